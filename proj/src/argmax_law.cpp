#include "cenobreak/argmax_law.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cenobreak {

namespace detail {

namespace {
constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kInvSqrt2Pi = 0.3989422804014326779;

double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }
double norm_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }
}  // namespace

double log_norm_cdf(double x) {
  if (x > -35.0) return std::log(norm_cdf(x));
  // Asymptotic expansion Phi(-t) = pdf(t)/t * (1 - 1/t^2 + 3/t^4 - ...).
  const double t = -x;
  const double it2 = 1.0 / (t * t);
  const double series = 1.0 + it2 * (-1.0 + it2 * (3.0 + it2 * (-15.0 + it2 * 105.0)));
  return -0.5 * t * t - std::log(t) - 0.5 * std::log(2.0 * std::numbers::pi) +
         std::log(series);
}

}  // namespace detail

namespace {

using detail::log_norm_cdf;
using detail::norm_cdf;
using detail::norm_pdf;

/// H(a, lam) = P(argmax < -a) for the normalized two-sided process whose
/// right-branch drift/variance ratio enters only through lam > 0.
double h_closed(double a, double lam) {
  if (a == 0.0) return lam / (1.0 + lam);
  const double s = 0.5 * std::sqrt(a);
  const double log_ef = 2.0 * lam * (1.0 + lam) * s * s +
                        log_norm_cdf(-(2.0 * lam + 1.0) * s);
  const double ef = std::exp(log_ef);
  const double cs = norm_cdf(s);
  const double cms = norm_cdf(-s);
  return lam / (1.0 + lam) - (2.0 * cs - 1.0) + (cs - ef) / (1.0 + lam) -
         2.0 * s * norm_pdf(s) + 2.0 * s * s * cms + (cms - ef) / lam;
}

void check_ratios(double xi, double phi) {
  if (!(xi > 0.0) || !(phi > 0.0) || !std::isfinite(xi) || !std::isfinite(phi)) {
    throw std::invalid_argument("break_argmax law requires finite xi > 0 and phi > 0");
  }
}

}  // namespace

double break_argmax_cdf(double x, double xi, double phi) {
  check_ratios(xi, phi);
  if (!std::isfinite(x)) return x > 0.0 ? 1.0 : 0.0;
  if (x <= 0.0) return h_closed(-x, xi / phi);
  return 1.0 - h_closed((xi * xi / phi) * x, phi / xi);
}

double break_argmax_quantile(double p, double xi, double phi) {
  check_ratios(xi, phi);
  if (!(p > 0.0) || !(p < 1.0)) {
    throw std::invalid_argument("quantile probability must lie in (0, 1)");
  }
  double lo = -1.0, hi = 1.0;
  while (break_argmax_cdf(lo, xi, phi) > p) {
    lo *= 2.0;
    if (lo < -1e9) throw std::runtime_error("quantile bracket failed (lower)");
  }
  while (break_argmax_cdf(hi, xi, phi) < p) {
    hi *= 2.0;
    if (hi > 1e9) throw std::runtime_error("quantile bracket failed (upper)");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= 1e-8 * std::max(1.0, std::abs(mid))) return mid;
    (break_argmax_cdf(mid, xi, phi) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace cenobreak
