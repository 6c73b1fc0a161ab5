#pragma once
#include <cmath>
#include <limits>

#include "cenobreak/kernels.hpp"

namespace cenobreak::kernels {

// Scalar segment-cost formulas shared by the scalar kernels, the SSR-table
// builder, and the AVX2 lane arithmetic (which mirrors the operation order
// exactly; the build disables FP contraction so both paths round identically).

/// Degeneracy rule for the symmetric 2x2 moment matrix [[n, sw], [sw, sww]]:
/// degenerate when det <= 0 or the eigenvalue ratio exceeds 1e12.
inline bool moment2x2_degenerate(double n, double sw, double sww, double det) {
  if (!(det > 0.0)) return true;
  const double tr = n + sww;
  const double disc_sq = tr * tr - 4.0 * det;
  const double disc = disc_sq > 0.0 ? std::sqrt(disc_sq) : 0.0;
  const double top = tr + disc;
  // lambda_max / lambda_min = top^2 / (4 det)
  return top * top > 4.0e12 * det;
}

/// SSR of a mean fit on rows [i, e] from prefix moments, clamped at 0.
inline double q1_cost(const Q1View& pf, std::int64_t i, std::int64_t e) {
  const double n = static_cast<double>(e - i + 1);
  const double sy = pf.sy[e + 1] - pf.sy[i];
  const double syy = pf.syy[e + 1] - pf.syy[i];
  const double ssr = syy - (sy * sy) / n;
  return ssr > 0.0 ? ssr : 0.0;
}

/// SSR of an intercept+slope fit on rows [i, e] from prefix moments; +inf on
/// a degenerate moment matrix; clamped at 0.
inline double q2_cost(const Q2View& pf, std::int64_t i, std::int64_t e) {
  const double n = static_cast<double>(e - i + 1);
  const double sy = pf.sy[e + 1] - pf.sy[i];
  const double syy = pf.syy[e + 1] - pf.syy[i];
  const double sw = pf.sw[e + 1] - pf.sw[i];
  const double sww = pf.sww[e + 1] - pf.sww[i];
  const double swy = pf.swy[e + 1] - pf.swy[i];
  const double det = n * sww - sw * sw;
  if (moment2x2_degenerate(n, sw, sww, det)) {
    return std::numeric_limits<double>::infinity();
  }
  const double b0 = (sww * sy - sw * swy) / det;
  const double b1 = (n * swy - sw * sy) / det;
  const double ssr = syy - b0 * sy - b1 * swy;
  return ssr > 0.0 ? ssr : 0.0;
}

}  // namespace cenobreak::kernels
