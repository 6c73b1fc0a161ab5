#pragma once
#include <Eigen/Dense>

#include "cenobreak/kernels.hpp"

namespace cenobreak {

/// Long-run covariance configuration. The quadratic-spectral kernel with the
/// AR(1)-approximation plug-in bandwidth is the only offered estimator;
/// the flags exist for ablation tests.
struct HacConfig {
  bool prewhiten = true;
  double bandwidth_override = -1.0;  ///< >= 0 forces the bandwidth (0 = no lag terms)
};

struct HacResult {
  Eigen::MatrixXd covariance;     ///< symmetric PSD, k x k
  double bandwidth = 0.0;
  Eigen::MatrixXd prewhitening;   ///< AR(1) coefficient matrix (zero when unused)
  bool prewhitened = false;
  bool var_fallback = false;      ///< VAR(1) was singular; fell back to no prewhitening
  bool eigen_clamped = false;     ///< AR(1) spectrum clamped to modulus 0.97
  bool psd_clipped = false;       ///< negative eigenvalues clipped to 0
};

/// Quadratic-spectral kernel weight,
///   k(x) = 25/(12 pi^2 x^2) (sin(6 pi x/5)/(6 pi x/5) - cos(6 pi x/5)),
/// with k(0) = 1 via the series expansion near the removable singularity.
double qs_kernel(double x);

/// First-order vector-autoregression filter for score sequences (rows = t,
/// cols = components). Returns residuals e_t = v_t - A v_{t-1} (one row
/// shorter) and the coefficient matrix, with the spectrum of A clamped to
/// modulus <= 0.97 (the filter and the later recoloring use the same clamped
/// matrix). Throws std::runtime_error on a singular regression.
struct PrewhitenResult {
  Eigen::MatrixXd residuals;
  Eigen::MatrixXd A;
  bool clamped = false;
};
PrewhitenResult prewhiten(const Eigen::MatrixXd& v);

/// Prewhitened kernel long-run variance of the scores:
/// VAR(1) filter -> QS-weighted autocovariance sum with the AR(1) plug-in
/// bandwidth S_T = 1.3221 (alpha_hat(2) n)^{1/5} (equal component weights) ->
/// recoloring through (I - A)^{-1} -> symmetrization and PSD clipping.
/// With prewhiten = false and bandwidth_override = 0 this reduces exactly to
/// the outer-product (White) variance.
HacResult hac_covariance(const Eigen::MatrixXd& scores, const HacConfig& cfg = {},
                         KernelKind kernel = KernelKind::Auto);

}  // namespace cenobreak
