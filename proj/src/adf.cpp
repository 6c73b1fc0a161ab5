#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "cenobreak/inference.hpp"
#include "cenobreak/regression.hpp"

namespace cenobreak {

namespace {

/// Fit dy_t = a + g y_{t-1} + sum_i b_i dy_{t-i} + e over 0-based t in
/// [t0, n_dy], where dy[t] = y[t] - y[t-1] for t >= 1.
struct AdfRegression {
  double ssr = 0.0;
  double stat = 0.0;  // g / se(g)
  std::size_t nobs = 0;
};

AdfRegression adf_regression(std::span<const double> y, int k, std::size_t t0) {
  const std::size_t n = y.size();
  const std::size_t nobs = n - t0;
  const auto cols = static_cast<Eigen::Index>(k) + 2;
  Eigen::MatrixXd x(static_cast<Eigen::Index>(nobs), cols);
  Eigen::VectorXd b(static_cast<Eigen::Index>(nobs));
  for (std::size_t t = t0; t < n; ++t) {
    const auto r = static_cast<Eigen::Index>(t - t0);
    b(r) = y[t] - y[t - 1];
    x(r, 0) = 1.0;
    x(r, 1) = y[t - 1];
    for (int i = 1; i <= k; ++i) {
      x(r, 1 + i) = y[t - i] - y[t - i - 1];
    }
  }
  const OlsFit fit = ols(x, b);
  AdfRegression out;
  out.ssr = fit.ssr;
  out.nobs = nobs;
  const double dof = static_cast<double>(nobs) - static_cast<double>(cols);
  if (dof <= 0.0) throw std::runtime_error("ADF regression has no degrees of freedom");
  const double var_g = fit.ssr / dof * fit.xtx_inv(1, 1);
  out.stat = var_g > 0.0 ? fit.coef(1) / std::sqrt(var_g)
                         : std::numeric_limits<double>::quiet_NaN();
  return out;
}

}  // namespace

AdfResult adf_test(std::span<const double> y, double alpha) {
  if (alpha != 0.01) {
    throw std::invalid_argument("only the 1% level is tabulated for the ADF test");
  }
  const std::size_t n = y.size();
  if (n < 25) throw std::invalid_argument("ADF test requires at least 25 observations");
  for (const double v : y) {
    if (!std::isfinite(v)) throw std::invalid_argument("ADF input must be finite");
  }

  const int k_max = static_cast<int>(
      std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));

  // Lag order by AIC on the common sample (same observations for every k).
  const std::size_t t0_common = static_cast<std::size_t>(k_max) + 1;
  int best_k = 0;
  double best_aic = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= k_max; ++k) {
    const AdfRegression reg = adf_regression(y, k, t0_common);
    const double nf = static_cast<double>(reg.nobs);
    const double aic = nf * std::log(reg.ssr / nf) + 2.0 * (k + 2);
    if (aic < best_aic) {
      best_aic = aic;
      best_k = k;
    }
  }

  // Refit the chosen order on its maximal sample.
  const AdfRegression reg =
      adf_regression(y, best_k, static_cast<std::size_t>(best_k) + 1);

  AdfResult out;
  out.statistic = reg.stat;
  out.lag_order = best_k;
  out.nobs = reg.nobs;
  const double m = static_cast<double>(reg.nobs);
  out.critical_value_1pct =
      -3.43035 - 6.5393 / m - 16.786 / (m * m) - 79.433 / (m * m * m);
  out.reject_at_1pct = out.statistic < out.critical_value_1pct;
  return out;
}

}  // namespace cenobreak
