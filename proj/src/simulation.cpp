#include "cenobreak/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cenobreak/breakpoints.hpp"
#include "cenobreak/inference.hpp"

namespace cenobreak {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

DgpConfig dgp_preset(int id, bool serial_errors) {
  DgpConfig d;
  switch (id) {
    case 1: d.sigma = 1.0; d.c1 = 0.1; d.c2 = 0.2; d.phi1 = 1.0;  d.phi2 = 1.0;  break;
    case 2: d.sigma = 1.0; d.c1 = 0.1; d.c2 = 1.0; d.phi1 = 1.0;  d.phi2 = 1.0;  break;
    case 3: d.sigma = 1.0; d.c1 = 0.1; d.c2 = 1.0; d.phi1 = 0.95; d.phi2 = 0.95; break;
    case 4: d.sigma = 1.0; d.c1 = 0.1; d.c2 = 1.0; d.phi1 = 0.95; d.phi2 = 1.0;  break;
    case 5: d.sigma = 1.0; d.c1 = 0.1; d.c2 = 1.0; d.phi1 = 0.5;  d.phi2 = 1.0;  break;
    case 6: d.sigma = 1.0; d.c1 = 1.0; d.c2 = 1.0; d.phi1 = 1.0;  d.phi2 = 1.0;  break;
    case 7: d.sigma = 0.5; d.c1 = 0.1; d.c2 = 1.0; d.phi1 = 1.0;  d.phi2 = 1.0;  break;
    case 8: d.sigma = 1.0; d.c1 = 0.1; d.c2 = 1.0; d.phi1 = 0.5;  d.phi2 = 0.5;  break;
    default: throw std::invalid_argument("DGP id must be 1..8");
  }
  if (serial_errors) d.error_kind = ErrorKind::Arma;
  return d;
}

double GaussianSampler::operator()() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  // Polar method: uniform pair in the unit disk -> two independent normals.
  for (;;) {
    const double u = 2.0 * std::ldexp(static_cast<double>(rng_() >> 11), -53) - 1.0;
    const double v = 2.0 * std::ldexp(static_cast<double>(rng_() >> 11), -53) - 1.0;
    const double s = u * u + v * v;
    if (s >= 1.0 || s == 0.0) continue;
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    cached_ = v * f;
    has_cached_ = true;
    return u * f;
  }
}

std::vector<double> generate(const DgpConfig& dgp, std::uint64_t seed) {
  if (dgp.T < 2) throw std::invalid_argument("DGP length must be >= 2");
  if (!(dgp.break_at > 0) || dgp.break_at >= dgp.T) {
    throw std::invalid_argument("DGP break must satisfy 0 < break_at < T");
  }
  if (!(dgp.sigma >= 0.0)) throw std::invalid_argument("DGP sigma must be >= 0");
  if (dgp.error_kind == ErrorKind::Arma && !(std::abs(dgp.psi) < 1.0)) {
    throw std::invalid_argument("ARMA errors require |psi| < 1");
  }

  GaussianSampler g(seed);
  std::vector<double> y(dgp.T);
  double y_prev = 0.0;

  if (dgp.error_kind == ErrorKind::Iid) {
    for (std::size_t t = 1; t <= dgp.T; ++t) {
      const bool pre = t <= dgp.break_at;
      const double eps = dgp.sigma * g();
      y_prev = (pre ? dgp.c1 : dgp.c2) + (pre ? dgp.phi1 : dgp.phi2) * y_prev + eps;
      y[t - 1] = y_prev;
    }
    return y;
  }

  const double s2 = dgp.sigma * dgp.sigma;
  const double eta_var =
      s2 * (1.0 - dgp.psi * dgp.psi) / (1.0 + dgp.theta * dgp.theta + 2.0 * dgp.psi * dgp.theta);
  if (!(eta_var >= 0.0)) throw std::invalid_argument("ARMA innovation variance is negative");
  const double eta_sd = std::sqrt(eta_var);
  // Stationary start: eta_0 ~ N(0, eta_var); eps_0 = eta_0 + independent
  // remainder, reproducing Var(eps) = sigma^2 and Cov(eps, eta) = eta_var.
  double eta_prev = eta_sd * g();
  double eps_prev = eta_prev + std::sqrt(std::max(s2 - eta_var, 0.0)) * g();
  for (std::size_t t = 1; t <= dgp.T; ++t) {
    const double eta = eta_sd * g();
    const double eps = dgp.psi * eps_prev + dgp.theta * eta_prev + eta;
    eps_prev = eps;
    eta_prev = eta;
    const bool pre = t <= dgp.break_at;
    y_prev = (pre ? dgp.c1 : dgp.c2) + (pre ? dgp.phi1 : dgp.phi2) * y_prev + eps;
    y[t - 1] = y_prev;
  }
  return y;
}

namespace {

/// Converts an original-scale break index (0-based position of the last
/// observation of the pre-break regime) to 1-based time units.
long to_time_units(std::size_t break_index) { return static_cast<long>(break_index) + 1; }

Replication run_one(const StudyConfig& cfg, std::size_t rep, KernelKind kernel) {
  Replication r;
  r.rep = rep;
  const std::vector<double> y = generate(cfg.dgp, cfg.seed + rep);

  EngineOptions opt;
  opt.min_segment_obs = cfg.min_len;
  opt.kernel = kernel;

  if (cfg.mode == StudyMode::FixedM) {
    const BreakFit fit = estimate_values(y, cfg.spec, cfg.m_fixed, cfg.min_len, opt);
    for (const std::size_t b : fit.break_indices) r.breaks.push_back(to_time_units(b));
    const auto cis = break_confidence_intervals(y, fit, cfg.ci_level, {}, kernel);
    if (!cis.empty()) {
      const BreakCI& ci = cis.front();
      r.ci_unbounded = ci.unbounded;
      if (ci.unbounded) {
        r.ci_lower = std::numeric_limits<long>::min();
        r.ci_upper = std::numeric_limits<long>::max();
        r.covered = true;
      } else {
        r.ci_lower = ci.lower_index + 1;
        r.ci_upper = ci.upper_index + 1;
        const long truth = static_cast<long>(cfg.dgp.break_at);
        r.covered = r.ci_lower <= truth && truth <= r.ci_upper;
      }
    }
    return r;
  }

  const std::vector<BreakFit> fits =
      estimate_all_values(y, cfg.spec, cfg.m_max, cfg.min_len, opt);
  std::vector<double> ssr_path;
  ssr_path.reserve(fits.size());
  for (const BreakFit& f : fits) ssr_path.push_back(f.total_ssr);
  const IcTable ic = information_criteria(
      ssr_path, fits.front().sample_rows, regime_param_count(cfg.spec),
      global_param_count(cfg.spec));
  r.m_bic = static_cast<long>(ic.selected_bic);
  r.m_lwz = static_cast<long>(ic.selected_lwz);
  r.m_kt = static_cast<long>(ic.selected_kt);
  for (const std::size_t b : fits[ic.selected_bic].break_indices) {
    r.breaks.push_back(to_time_units(b));
  }
  return r;
}

double median(std::vector<double> v) {
  if (v.empty()) return kNaN;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

StudyResult run_study(const StudyConfig& cfg, KernelKind kernel) {
  if (cfg.replications < 1) throw std::invalid_argument("study needs >= 1 replication");
  StudyResult out;
  out.config = cfg;
  out.replications.reserve(cfg.replications);

  for (std::size_t rep = 0; rep < cfg.replications; ++rep) {
    try {
      out.replications.push_back(run_one(cfg, rep, kernel));
    } catch (const std::exception& e) {
      Replication r;
      r.rep = rep;
      r.ok = false;
      r.error = e.what();
      out.replications.push_back(std::move(r));
      ++out.failures;
    }
  }

  out.mean_break = kNaN;
  out.median_lower = kNaN;
  out.median_upper = kNaN;
  out.coverage = kNaN;
  out.mean_m_bic = kNaN;
  out.mean_m_lwz = kNaN;
  out.mean_m_kt = kNaN;
  out.correct_bic = kNaN;
  out.correct_lwz = kNaN;
  out.correct_kt = kNaN;

  if (cfg.mode == StudyMode::FixedM) {
    std::vector<double> firsts, lowers, uppers;
    std::size_t covered = 0, with_ci = 0;
    for (const Replication& r : out.replications) {
      if (!r.ok || r.breaks.empty()) continue;
      firsts.push_back(static_cast<double>(r.breaks.front()));
      ++with_ci;
      if (r.covered) ++covered;
      if (!r.ci_unbounded) {
        lowers.push_back(static_cast<double>(r.ci_lower));
        uppers.push_back(static_cast<double>(r.ci_upper));
      }
    }
    if (!firsts.empty()) {
      double s = 0.0;
      for (const double v : firsts) s += v;
      out.mean_break = s / static_cast<double>(firsts.size());
    }
    out.median_lower = median(std::move(lowers));
    out.median_upper = median(std::move(uppers));
    if (with_ci > 0) out.coverage = static_cast<double>(covered) / static_cast<double>(with_ci);
    return out;
  }

  out.share_m_bic.assign(cfg.m_max + 1, 0.0);
  out.share_m_lwz.assign(cfg.m_max + 1, 0.0);
  out.share_m_kt.assign(cfg.m_max + 1, 0.0);
  const long truth = static_cast<long>(cfg.dgp.true_breaks());
  double sum_bic = 0.0, sum_lwz = 0.0, sum_kt = 0.0;
  std::size_t ok_count = 0, hit_bic = 0, hit_lwz = 0, hit_kt = 0;
  for (const Replication& r : out.replications) {
    if (!r.ok) continue;
    ++ok_count;
    sum_bic += static_cast<double>(r.m_bic);
    sum_lwz += static_cast<double>(r.m_lwz);
    sum_kt += static_cast<double>(r.m_kt);
    if (r.m_bic >= 0 && r.m_bic <= static_cast<long>(cfg.m_max)) ++out.share_m_bic[static_cast<std::size_t>(r.m_bic)];
    if (r.m_lwz >= 0 && r.m_lwz <= static_cast<long>(cfg.m_max)) ++out.share_m_lwz[static_cast<std::size_t>(r.m_lwz)];
    if (r.m_kt >= 0 && r.m_kt <= static_cast<long>(cfg.m_max)) ++out.share_m_kt[static_cast<std::size_t>(r.m_kt)];
    if (r.m_bic == truth) ++hit_bic;
    if (r.m_lwz == truth) ++hit_lwz;
    if (r.m_kt == truth) ++hit_kt;
  }
  if (ok_count > 0) {
    const double n = static_cast<double>(ok_count);
    out.mean_m_bic = sum_bic / n;
    out.mean_m_lwz = sum_lwz / n;
    out.mean_m_kt = sum_kt / n;
    out.correct_bic = static_cast<double>(hit_bic) / n;
    out.correct_lwz = static_cast<double>(hit_lwz) / n;
    out.correct_kt = static_cast<double>(hit_kt) / n;
    for (auto* shares : {&out.share_m_bic, &out.share_m_lwz, &out.share_m_kt}) {
      for (double& v : *shares) v /= n;
    }
  }
  return out;
}

std::vector<DensityPoint> density_export(const StudyResult& result) {
  std::vector<double> estimates;
  for (const Replication& r : result.replications) {
    if (r.ok && !r.breaks.empty()) {
      for (const long b : r.breaks) estimates.push_back(static_cast<double>(b));
    }
  }
  if (estimates.size() < 2) {
    throw std::runtime_error("density export needs at least 2 break estimates");
  }

  const double n = static_cast<double>(estimates.size());
  double mean = 0.0;
  for (const double v : estimates) mean += v;
  mean /= n;
  double var = 0.0;
  for (const double v : estimates) var += (v - mean) * (v - mean);
  var /= (n - 1.0);
  const double sd = std::sqrt(var);
  // Silverman's rule; floor keeps the degenerate one-point cloud renderable.
  const double bw = std::max(1.06 * sd * std::pow(n, -0.2), 0.5);

  const long t_max = static_cast<long>(result.config.dgp.T);
  std::vector<DensityPoint> out(static_cast<std::size_t>(t_max));
  for (long t = 1; t <= t_max; ++t) out[static_cast<std::size_t>(t - 1)].t = t;
  for (const double v : estimates) {
    const long t = static_cast<long>(v);
    if (t >= 1 && t <= t_max) ++out[static_cast<std::size_t>(t - 1)].count;
  }
  constexpr double inv_sqrt_2pi = 0.3989422804014326779;
  for (DensityPoint& p : out) {
    p.density = static_cast<double>(p.count) / n;
    double acc = 0.0;
    for (const double v : estimates) {
      const double z = (static_cast<double>(p.t) - v) / bw;
      acc += std::exp(-0.5 * z * z);
    }
    p.kde = acc * inv_sqrt_2pi / (n * bw);
  }
  return out;
}

}  // namespace cenobreak
