#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cenobreak/breakpoints.hpp"
#include "cenobreak/hac.hpp"
#include "cenobreak/types.hpp"

namespace cenobreak {

/// Asymmetric confidence interval for one estimated break date.
///
/// Index bounds are on the same scale as BreakFit::break_indices and are NOT
/// clamped to the sample: on weakly identified breaks the limit law can place
/// bounds far outside [0, n). Age bounds are filled only by the BinnedSeries
/// overload; `lower_age_ma` is the OLDER age (maps to `lower_index`, ages
/// decrease with index), so lower_age_ma >= age(break) >= upper_age_ma.
struct BreakCI {
  std::size_t break_number = 0;  ///< 0-based position within the fit
  std::size_t break_index = 0;   ///< point estimate (copy of fit index)
  double level = 0.95;
  long lower_index = 0;  ///< floor of the lower bound (outward rounding)
  long upper_index = 0;  ///< ceil of the upper bound (outward rounding)
  double lower_age_ma = 0.0;
  double upper_age_ma = 0.0;
  double xi = 0.0;       ///< post/pre signal-strength ratio d'Q2 d / d'Q1 d
  double phi_ratio = 0.0;  ///< post/pre long-run variance ratio d'O2 d / d'O1 d
  double scale_c = 0.0;  ///< index units per unit of the limit law
  bool unbounded = false;  ///< vanishing coefficient change: CI undefined
};

/// Confidence intervals for every break of `fit`, from the asymptotic argmax
/// law of the break-date estimator with regime-specific moment matrices and
/// HAC long-run score variances. `y` must be the exact series the fit was
/// estimated from.
std::vector<BreakCI> break_confidence_intervals(std::span<const double> y,
                                                const BreakFit& fit,
                                                double level = 0.95,
                                                const HacConfig& hac = {},
                                                KernelKind kernel = KernelKind::Auto);

/// Same, plus age bounds mapped through the inter-bin boundary convention.
std::vector<BreakCI> break_confidence_intervals(const BinnedSeries& series,
                                                const BreakFit& fit,
                                                double level = 0.95,
                                                const HacConfig& hac = {},
                                                KernelKind kernel = KernelKind::Auto);

struct IcRow {
  std::size_t m = 0;
  double ssr = 0.0;
  double bic = 0.0;
  double lwz = 0.0;
  double kt = 0.0;
};

/// Information-criterion table over m = 0..M with per-criterion argmin
/// (ties resolved to the smallest m).
struct IcTable {
  std::vector<IcRow> rows;
  std::size_t selected_bic = 0;
  std::size_t selected_lwz = 0;
  std::size_t selected_kt = 0;
};

/// Criteria over a path of global SSR values ssr_by_m[m], m = 0..M, for a
/// model with q breaking coefficients per regime and p global coefficients.
/// With p_m = (m+1)q + p + m (all estimated quantities including the break
/// dates):
///   BIC(m) = ln(SSR_m/T) + p_m ln(T)/T
///   LWZ(m) = ln(SSR_m/(T - p_m)) + 0.299 p_m (ln T)^{2.1} / T
///   KT(m)  = ln(SSR_m/T) + ((m+1)q + p) ln(T)/T   (break dates not counted)
IcTable information_criteria(const std::vector<double>& ssr_by_m, std::size_t T,
                             std::size_t q, std::size_t p);

/// Convenience overload taking the DP output and the model spec.
IcTable information_criteria(const SsrByM& ssr_by_m, std::size_t T, ModelSpec spec);

/// Augmented Dickey-Fuller unit-root screen (left-tailed; null is
/// non-stationarity). Regression includes an intercept, no trend.
struct AdfResult {
  double statistic = 0.0;
  int lag_order = 0;
  bool reject_at_1pct = false;
  double critical_value_1pct = 0.0;
  std::size_t nobs = 0;  ///< observations in the final regression
};

/// Lag order chosen by AIC over 0..floor(12 (T/100)^{1/4}) on the common
/// sample, then refit on the maximal sample for the chosen order; the 1%
/// critical value uses a response-surface in the regression sample size.
/// Requires length >= 25 and alpha == 0.01 (only the 1% level is tabulated).
AdfResult adf_test(std::span<const double> y, double alpha = 0.01);

}  // namespace cenobreak
