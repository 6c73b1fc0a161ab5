#pragma once

namespace cenobreak {

/// CDF G(x) of the limiting law of the scaled break-date estimation error.
///
/// The limit variable is argmax_s V(s) of the two-sided drifted process
///   V(s) = W1(-s) - |s|/2            for s <= 0,
///   V(s) = sqrt(phi) W2(s) - xi|s|/2 for s >  0,
/// with independent standard Wiener processes W1, W2. `xi` is the ratio of
/// post- to pre-break signal strength and `phi` the ratio of post- to
/// pre-break long-run error variance; xi = phi = 1 gives the symmetric case.
/// Evaluated in closed form (Gaussian CDF/pdf terms only); requires
/// xi > 0, phi > 0.
double break_argmax_cdf(double x, double xi, double phi);

/// Quantile function: the x with break_argmax_cdf(x) = p, for p in (0, 1).
/// Solved by bracket doubling plus bisection to mixed tolerance
/// 1e-8 * max(1, |x|).
double break_argmax_quantile(double p, double xi, double phi);

namespace detail {
/// log of the standard normal CDF, stable for arbitrarily negative x.
double log_norm_cdf(double x);
}  // namespace detail

}  // namespace cenobreak
