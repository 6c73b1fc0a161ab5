#include "cenobreak/breakpoints.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cenobreak {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Bellman recursion over suffixes. layer k, start i:
///   best[k][i] = min_e cost(i, e) + best[k-1][e+1],
/// e in [i + min_len - 1, n - 1 - k*min_len]; best[0][i] = cost(i, n-1).
/// The relax callable returns the min and smallest argmin e over that range.
template <class Relax, class LastCost>
SsrByM dp_core(std::size_t n, std::size_t max_m, std::size_t min_len,
               Relax relax, LastCost last_cost) {
  SsrByM out;
  if (n == 0 || min_len == 0 || n < min_len) return out;
  const std::size_t feasible_m = std::min(max_m, n / min_len - 1);
  const std::size_t layers = feasible_m + 1;

  std::vector<std::vector<double>> best(layers, std::vector<double>(n + 1, kInf));
  std::vector<std::vector<std::int64_t>> back;
  back.reserve(layers);
  for (std::size_t k = 0; k < layers; ++k) back.emplace_back(n + 1, -1);

  for (std::size_t i = 0; i + min_len <= n; ++i) best[0][i] = last_cost(i);

  for (std::size_t k = 1; k < layers; ++k) {
    const auto e_hi_bound = static_cast<std::int64_t>(n - 1 - k * min_len);
    for (std::size_t i = 0; i + (k + 1) * min_len <= n; ++i) {
      const auto e_lo = static_cast<std::int64_t>(i + min_len - 1);
      const auto r = relax(best[k - 1].data(), static_cast<std::int64_t>(i), e_lo, e_hi_bound);
      best[k][i] = r.val;
      back[k][i] = r.idx;
    }
  }

  out.optimal_ssr.reserve(layers);
  out.optimal_breaks.reserve(layers);
  for (std::size_t m = 0; m < layers; ++m) {
    if (!(best[m][0] < kInf)) break;  // infeasible/degenerate beyond here
    out.optimal_ssr.push_back(best[m][0]);
    std::vector<std::size_t> breaks;
    breaks.reserve(m);
    std::size_t i = 0;
    for (std::size_t k = m; k >= 1; --k) {
      const std::int64_t e = back[k][i];
      if (e < 0) throw std::logic_error("break recovery hit an unset backpointer");
      breaks.push_back(static_cast<std::size_t>(e));
      i = static_cast<std::size_t>(e) + 1;
    }
    out.optimal_breaks.push_back(std::move(breaks));
  }
  return out;
}

}  // namespace

SsrByM dp_global_breaks(const SegmentCost& cost, std::size_t max_m, std::size_t min_len,
                        KernelKind kernel) {
  const std::size_t n = cost.rows();
  min_len = std::max<std::size_t>(min_len, static_cast<std::size_t>(cost.q()));
  const auto& kt = kernels::get_kernels(kernel);
  if (cost.q() == 1) {
    const auto pf = cost.q1_view();
    return dp_core(
        n, max_m, min_len,
        [&](const double* prev, std::int64_t i, std::int64_t lo, std::int64_t hi) {
          return kt.relax_q1(prev, pf, i, lo, hi);
        },
        [&](std::size_t i) { return cost.ssr(i, n - 1); });
  }
  const auto pf = cost.q2_view();
  return dp_core(
      n, max_m, min_len,
      [&](const double* prev, std::int64_t i, std::int64_t lo, std::int64_t hi) {
        return kt.relax_q2(prev, pf, i, lo, hi);
      },
      [&](std::size_t i) { return cost.ssr(i, n - 1); });
}

SsrByM dp_global_breaks(const SsrTable& table, std::size_t max_m, std::size_t min_len) {
  const std::size_t n = table.n();
  min_len = std::max<std::size_t>(min_len, static_cast<std::size_t>(table.q()));
  return dp_core(
      n, max_m, min_len,
      [&](const double* prev, std::int64_t i, std::int64_t lo, std::int64_t hi) {
        kernels::MinLoc best{kInf, -1};
        for (std::int64_t e = lo; e <= hi; ++e) {
          const double val = prev[e + 1] + table.at(static_cast<std::size_t>(i),
                                                    static_cast<std::size_t>(e));
          if (val < best.val) best = {val, e};
        }
        return best;
      },
      [&](std::size_t i) { return table.at(i, n - 1); });
}

double boundary_age_after(const BinnedSeries& series, std::size_t i) {
  if (i + 1 >= series.size()) throw std::runtime_error("boundary index out of range");
  return 0.5 * (series.age_of(i) + series.age_of(i + 1));
}

std::size_t resolve_min_len(const BinnedSeries& series, const EngineOptions& opt) {
  if (opt.min_segment_obs > 0) return opt.min_segment_obs;
  return min_segment_obs_from_h(opt.h_myr, series.bin_kyr);
}

namespace {

std::size_t resolve_max_breaks(std::size_t rows, std::size_t min_len, std::size_t requested) {
  const std::size_t feasible = rows / min_len == 0 ? 0 : rows / min_len - 1;
  if (requested == 0) return std::min(feasible, kMaxBreaksCap);
  return std::min(requested, feasible);
}

/// Assembles a BreakFit from a partition (rows scale) and per-segment fits.
BreakFit make_fit(const Design& design, const std::vector<std::size_t>& breaks,
                  const GlobalCoefficients& beta, std::size_t min_len) {
  BreakFit fit;
  fit.spec = design.spec;
  fit.m = breaks.size();
  fit.beta = beta;
  fit.min_segment_obs = min_len;
  fit.sample_rows = design.rows();
  const PartitionFit pf = fit_segments(design, breaks, beta);
  fit.segments = pf.segments;
  fit.total_ssr = pf.total_ssr;
  fit.break_indices.reserve(breaks.size());
  for (std::size_t b : breaks) fit.break_indices.push_back(b + design.offset);
  return fit;
}

BreakFit estimate_fixed_ar(const Design& design, std::size_t m, std::size_t min_len,
                           const EngineOptions& opt) {
  // Coordinate descent: (i) breaks by DP on the beta-adjusted series,
  // (ii) joint OLS of (beta, intercepts) given breaks. Both steps weakly
  // decrease the same SSR, so the iteration converges monotonically.
  JointFixedArFit joint = joint_fixed_ar_fit(design, {});  // beta ignoring breaks
  double beta = joint.phi;
  double prev_ssr = joint.ssr;  // finite start: the no-break SSR bounds all iterates
  std::vector<std::size_t> breaks;
  bool converged = false;
  int iter = 0;
  for (; iter < opt.fixed_ar_max_iter; ++iter) {
    const SegmentCost cost = make_segment_cost(design, GlobalCoefficients{{beta}});
    SsrByM dp = dp_global_breaks(cost, m, min_len, opt.kernel);
    if (dp.max_feasible_m() < m || dp.optimal_ssr.size() <= m) {
      throw std::runtime_error("requested break count infeasible for sample");
    }
    breaks = dp.optimal_breaks[m];
    joint = joint_fixed_ar_fit(design, breaks);
    beta = joint.phi;
    if (std::abs(prev_ssr - joint.ssr) <= opt.fixed_ar_tol * std::max(1.0, prev_ssr)) {
      converged = true;
      ++iter;
      break;
    }
    prev_ssr = joint.ssr;
  }
  BreakFit fit = make_fit(design, breaks, GlobalCoefficients{{beta}}, min_len);
  fit.converged = converged;
  fit.iterations = iter;
  const auto nseg = static_cast<double>(breaks.size() + 1);
  const auto dof = static_cast<double>(design.rows()) - nseg - 1.0;
  fit.beta_se_ols = dof > 0 ? std::sqrt(joint.phi_var_ols) : 0.0;
  return fit;
}

}  // namespace

BreakFit estimate_values(std::span<const double> y, ModelSpec spec, std::size_t m,
                         std::size_t min_len, const EngineOptions& opt) {
  const Design design = design_rows(y, spec);
  min_len = std::max<std::size_t>(min_len, static_cast<std::size_t>(design.q()));
  if ((m + 1) * min_len > design.rows()) {
    throw std::runtime_error("requested break count infeasible for sample");
  }
  if (spec == ModelSpec::FixedAR && m > 0) {
    return estimate_fixed_ar(design, m, min_len, opt);
  }
  if (spec == ModelSpec::FixedAR) {  // m = 0: single joint fit
    const JointFixedArFit joint = joint_fixed_ar_fit(design, {});
    BreakFit fit = make_fit(design, {}, GlobalCoefficients{{joint.phi}}, min_len);
    fit.beta_se_ols = std::sqrt(joint.phi_var_ols);
    return fit;
  }
  const SegmentCost cost = make_segment_cost(design, {});
  const SsrByM dp = dp_global_breaks(cost, m, min_len, opt.kernel);
  if (dp.optimal_breaks.size() <= m) {
    throw std::runtime_error("requested break count infeasible for sample");
  }
  return make_fit(design, dp.optimal_breaks[m], {}, min_len);
}

std::vector<BreakFit> estimate_all_values(std::span<const double> y, ModelSpec spec,
                                          std::size_t m_max, std::size_t min_len,
                                          const EngineOptions& opt) {
  const Design design = design_rows(y, spec);
  min_len = std::max<std::size_t>(min_len, static_cast<std::size_t>(design.q()));
  const std::size_t m_cap = resolve_max_breaks(design.rows(), min_len,
                                               m_max == 0 ? 0 : m_max);
  std::vector<BreakFit> out;
  if (spec == ModelSpec::FixedAR) {
    for (std::size_t m = 0; m <= m_cap; ++m) {
      out.push_back(estimate_values(y, spec, m, min_len, opt));
    }
    return out;
  }
  const SegmentCost cost = make_segment_cost(design, {});
  const SsrByM dp = dp_global_breaks(cost, m_cap, min_len, opt.kernel);
  for (std::size_t m = 0; m < dp.optimal_breaks.size(); ++m) {
    out.push_back(make_fit(design, dp.optimal_breaks[m], {}, min_len));
  }
  return out;
}

namespace {

void attach_ages(BreakFit& fit, const BinnedSeries& series) {
  fit.break_ages_ma.clear();
  fit.break_ages_ma.reserve(fit.break_indices.size());
  for (std::size_t b : fit.break_indices) {
    fit.break_ages_ma.push_back(boundary_age_after(series, b));
  }
}

}  // namespace

BreakFit estimate(const BinnedSeries& series, ModelSpec spec, std::size_t m,
                  const EngineOptions& opt) {
  const std::size_t min_len = resolve_min_len(series, opt);
  BreakFit fit = estimate_values(series.value, spec, m, min_len, opt);
  attach_ages(fit, series);
  return fit;
}

std::vector<BreakFit> estimate_all(const BinnedSeries& series, ModelSpec spec,
                                   std::size_t m_max, const EngineOptions& opt) {
  const std::size_t min_len = resolve_min_len(series, opt);
  std::vector<BreakFit> fits =
      estimate_all_values(series.value, spec, m_max == 0 ? opt.max_breaks : m_max,
                          min_len, opt);
  for (auto& f : fits) attach_ages(f, series);
  return fits;
}

std::vector<BreakFit> estimate_path(const BinnedSeries& series, ModelSpec spec,
                                    std::size_t m_max, const EngineOptions& opt) {
  std::vector<BreakFit> all = estimate_all(series, spec, m_max, opt);
  if (!all.empty()) all.erase(all.begin());  // path runs m = 1..M
  return all;
}

}  // namespace cenobreak
