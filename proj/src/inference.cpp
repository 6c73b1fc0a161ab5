#include "cenobreak/inference.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cenobreak/argmax_law.hpp"
#include "cenobreak/regression.hpp"

namespace cenobreak {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct RegimeMoments {
  Eigen::MatrixXd q;      // (1/n) sum z z'
  Eigen::MatrixXd omega;  // long-run variance of the scores z u
};

/// Second-moment matrix and HAC score variance for estimation rows
/// [seg.start, seg.end] of the fit's design.
RegimeMoments regime_moments(const Design& design, const SegmentFit& seg,
                             double phi, const HacConfig& hac, KernelKind kernel) {
  const auto n = static_cast<Eigen::Index>(seg.end - seg.start + 1);
  const auto q = design.q();
  Eigen::MatrixXd z(n, q);
  Eigen::VectorXd u(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const std::size_t row = seg.start + static_cast<std::size_t>(r);
    double resp = design.resp[row];
    if (design.spec == ModelSpec::FixedAR) resp -= phi * design.lag[row];
    z(r, 0) = 1.0;
    double fitted = seg.delta[0];
    if (design.spec == ModelSpec::AR) {
      z(r, 1) = design.lag[row];
      fitted += seg.delta[1] * design.lag[row];
    }
    u(r) = resp - fitted;
  }

  RegimeMoments out;
  out.q = z.transpose() * z / static_cast<double>(n);
  const Eigen::MatrixXd scores = (z.array().colwise() * u.array()).matrix();
  if (n >= 4) {
    out.omega = hac_covariance(scores, hac, kernel).covariance;
  } else {
    out.omega = scores.transpose() * scores / static_cast<double>(n);
  }
  return out;
}

}  // namespace

std::vector<BreakCI> break_confidence_intervals(std::span<const double> y,
                                                const BreakFit& fit, double level,
                                                const HacConfig& hac,
                                                KernelKind kernel) {
  if (!(level > 0.0) || !(level < 1.0)) {
    throw std::invalid_argument("confidence level must lie in (0, 1)");
  }
  if (fit.m == 0) return {};
  if (fit.segments.size() != fit.m + 1) {
    throw std::invalid_argument("fit segments inconsistent with break count");
  }

  const Design design = design_rows(y, fit.spec);
  const double phi = fit.beta.beta.empty() ? 0.0 : fit.beta.beta[0];

  std::vector<RegimeMoments> moments;
  moments.reserve(fit.segments.size());
  for (const SegmentFit& seg : fit.segments) {
    moments.push_back(regime_moments(design, seg, phi, hac, kernel));
  }

  const double alpha = 1.0 - level;
  std::vector<BreakCI> out;
  out.reserve(fit.m);
  for (std::size_t j = 0; j < fit.m; ++j) {
    BreakCI ci;
    ci.break_number = j;
    ci.break_index = fit.break_indices[j];
    ci.level = level;
    ci.lower_age_ma = kNaN;
    ci.upper_age_ma = kNaN;

    const auto q = static_cast<Eigen::Index>(fit.segments[j].delta.size());
    Eigen::VectorXd delta(q);
    for (Eigen::Index i = 0; i < q; ++i) {
      const auto k = static_cast<std::size_t>(i);
      delta(i) = fit.segments[j + 1].delta[k] - fit.segments[j].delta[k];
    }
    const double dq1 = delta.dot(moments[j].q * delta);
    const double dq2 = delta.dot(moments[j + 1].q * delta);
    const double do1 = delta.dot(moments[j].omega * delta);
    const double do2 = delta.dot(moments[j + 1].omega * delta);

    if (!(dq1 > 0.0) || !(dq2 > 0.0) || !(do1 > 0.0) || !(do2 > 0.0) ||
        !std::isfinite(dq1) || !std::isfinite(dq2) || !std::isfinite(do1) ||
        !std::isfinite(do2)) {
      ci.unbounded = true;
      ci.xi = kNaN;
      ci.phi_ratio = kNaN;
      ci.scale_c = kNaN;
      ci.lower_index = std::numeric_limits<long>::min();
      ci.upper_index = std::numeric_limits<long>::max();
      out.push_back(ci);
      continue;
    }

    ci.xi = dq2 / dq1;
    ci.phi_ratio = do2 / do1;
    ci.scale_c = do1 / (dq1 * dq1);
    const double q_lo = break_argmax_quantile(alpha / 2.0, ci.xi, ci.phi_ratio);
    const double q_hi = break_argmax_quantile(1.0 - alpha / 2.0, ci.xi, ci.phi_ratio);
    const double est = static_cast<double>(ci.break_index);
    ci.lower_index = static_cast<long>(std::floor(est - ci.scale_c * q_hi));
    ci.upper_index = static_cast<long>(std::ceil(est - ci.scale_c * q_lo));
    // The interval must contain the point estimate; the widening below only
    // binds when the limit law is so asymmetric that a quantile crosses zero.
    ci.lower_index = std::min(ci.lower_index, static_cast<long>(ci.break_index));
    ci.upper_index = std::max(ci.upper_index, static_cast<long>(ci.break_index));
    out.push_back(ci);
  }
  return out;
}

std::vector<BreakCI> break_confidence_intervals(const BinnedSeries& series,
                                                const BreakFit& fit, double level,
                                                const HacConfig& hac,
                                                KernelKind kernel) {
  std::vector<BreakCI> out =
      break_confidence_intervals(std::span<const double>(series.value), fit, level,
                                 hac, kernel);
  const double step = series.bin_kyr / 1000.0;
  const double sign = series.reversed ? 1.0 : -1.0;
  const auto boundary_age = [&](double idx) {
    return series.start_age_ma + sign * (idx + 0.5) * step;
  };
  for (BreakCI& ci : out) {
    if (ci.unbounded) continue;
    ci.lower_age_ma = boundary_age(static_cast<double>(ci.lower_index));
    ci.upper_age_ma = boundary_age(static_cast<double>(ci.upper_index));
  }
  return out;
}

IcTable information_criteria(const std::vector<double>& ssr_by_m, std::size_t T,
                             std::size_t q, std::size_t p) {
  if (ssr_by_m.empty()) throw std::invalid_argument("empty SSR path");
  if (T < 2) throw std::invalid_argument("sample too small for information criteria");
  const double n = static_cast<double>(T);
  const double log_n = std::log(n);

  IcTable table;
  table.rows.reserve(ssr_by_m.size());
  for (std::size_t m = 0; m < ssr_by_m.size(); ++m) {
    IcRow row;
    row.m = m;
    row.ssr = ssr_by_m[m];
    const double pm = static_cast<double>((m + 1) * q + p + m);
    const double coef = static_cast<double>((m + 1) * q + p);
    if (row.ssr > 0.0) {
      row.bic = std::log(row.ssr / n) + pm * log_n / n;
      row.kt = std::log(row.ssr / n) + coef * log_n / n;
      row.lwz = n > pm ? std::log(row.ssr / (n - pm)) +
                             0.299 * pm * std::pow(log_n, 2.1) / n
                       : kInf;
    } else {
      row.bic = -kInf;
      row.kt = -kInf;
      row.lwz = n > pm ? -kInf : kInf;
    }
    table.rows.push_back(row);
  }

  const auto argmin = [&](double IcRow::* field) {
    std::size_t best = 0;
    for (std::size_t m = 1; m < table.rows.size(); ++m) {
      if (table.rows[m].*field < table.rows[best].*field) best = m;
    }
    return best;
  };
  table.selected_bic = argmin(&IcRow::bic);
  table.selected_lwz = argmin(&IcRow::lwz);
  table.selected_kt = argmin(&IcRow::kt);
  return table;
}

IcTable information_criteria(const SsrByM& ssr_by_m, std::size_t T, ModelSpec spec) {
  return information_criteria(ssr_by_m.optimal_ssr, T, regime_param_count(spec),
                              global_param_count(spec));
}

}  // namespace cenobreak
