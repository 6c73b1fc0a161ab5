#include "cenobreak/hac.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cenobreak {

double qs_kernel(double x) {
  const double ax = std::abs(x);
  const double z = 1.2 * std::numbers::pi * ax;  // 6 pi x / 5
  if (ax < 0.05) {
    // sin(z)/z - cos(z) = sum_{k>=1} (-1)^{k+1} 2k z^{2k} / (2k+1)!
    // => k(x) = sum_{k>=1} (-1)^{k+1} 6k z^{2k-2} / (2k+1)!
    const double z2 = z * z;
    double term = 1.0;  // k = 1: 6*1/3! = 1
    double acc = 1.0;
    double fact = 6.0;  // (2k+1)! running
    for (int k = 2; k <= 6; ++k) {
      fact *= (2 * k) * (2 * k + 1);
      term = 6.0 * static_cast<double>(k) / fact;
      acc += (k % 2 == 0 ? -term : term) * std::pow(z2, k - 1);
    }
    return acc;
  }
  return 25.0 / (12.0 * std::numbers::pi * std::numbers::pi * ax * ax) *
         (std::sin(z) / z - std::cos(z));
}

PrewhitenResult prewhiten(const Eigen::MatrixXd& v) {
  const Eigen::Index n = v.rows(), k = v.cols();
  if (n < k + 2) throw std::runtime_error("prewhitening needs at least dim + 2 rows");
  const Eigen::MatrixXd X = v.topRows(n - 1);
  const Eigen::MatrixXd Y = v.bottomRows(n - 1);
  const Eigen::MatrixXd xtx = X.transpose() * X;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(xtx);
  const double lmax = es.eigenvalues().maxCoeff();
  const double lmin = es.eigenvalues().minCoeff();
  if (!(lmax > 0.0) || lmin <= lmax * 1e-12) {
    throw std::runtime_error("singular prewhitening regression");
  }

  PrewhitenResult out;
  // A solves v_t = A v_{t-1} + e_t  =>  A = (Y'X)(X'X)^{-1}.
  out.A = xtx.ldlt().solve(X.transpose() * Y).transpose();

  Eigen::EigenSolver<Eigen::MatrixXd> spec(out.A);
  const double radius = spec.eigenvalues().cwiseAbs().maxCoeff();
  if (radius > 0.97) {
    out.A *= 0.97 / radius;
    out.clamped = true;
  }
  out.residuals = Y - X * out.A.transpose();
  return out;
}

namespace {

/// Autocovariance Gamma_j = (1/n) sum_{t=j}^{n-1} e_t e_{t-j}'.
Eigen::MatrixXd gamma_j(const Eigen::MatrixXd& e, Eigen::Index j,
                        const kernels::KernelTable& kt) {
  const Eigen::Index n = e.rows(), k = e.cols();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(k, k);
  const auto len = static_cast<std::size_t>(n - j);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) {
      g(a, b) = kt.dot(e.col(a).data() + j, e.col(b).data(), len) / static_cast<double>(n);
    }
  }
  return g;
}

/// AR(1) plug-in bandwidth (equal component weights):
/// S_T = 1.3221 (alpha_hat(2) n)^{1/5}.
double plug_in_bandwidth(const Eigen::MatrixXd& e) {
  const Eigen::Index n = e.rows(), k = e.cols();
  double num = 0.0, den = 0.0;
  for (Eigen::Index a = 0; a < k; ++a) {
    const auto u = e.col(a);
    double s_lag = 0.0, s_cross = 0.0;
    for (Eigen::Index t = 1; t < n; ++t) {
      s_lag += u(t - 1) * u(t - 1);
      s_cross += u(t) * u(t - 1);
    }
    double rho = s_lag > 0.0 ? s_cross / s_lag : 0.0;
    // Guard the (1-rho)^{-8} factors against near-unit roots; the filter has
    // already removed most persistence, so this rarely binds.
    rho = std::clamp(rho, -0.97, 0.97);
    double ssr = 0.0;
    for (Eigen::Index t = 1; t < n; ++t) {
      const double w = u(t) - rho * u(t - 1);
      ssr += w * w;
    }
    const double sigma2 = ssr / static_cast<double>(n - 1);
    const double om = 1.0 - rho;
    num += 4.0 * rho * rho * sigma2 * sigma2 / (om * om * om * om * om * om * om * om);
    den += sigma2 * sigma2 / (om * om * om * om);
  }
  if (!(den > 0.0)) return 0.0;  // all-zero residuals: no lag terms needed
  const double alpha2 = num / den;
  return 1.3221 * std::pow(alpha2 * static_cast<double>(e.rows()), 0.2);
}

}  // namespace

HacResult hac_covariance(const Eigen::MatrixXd& scores, const HacConfig& cfg,
                         KernelKind kernel) {
  if (scores.rows() < 4) throw std::runtime_error("hac_covariance needs >= 4 rows");
  const auto& kt = kernels::get_kernels(kernel);
  const Eigen::Index k = scores.cols();

  HacResult out;
  out.prewhitening = Eigen::MatrixXd::Zero(k, k);
  Eigen::MatrixXd e = scores;
  if (cfg.prewhiten) {
    try {
      PrewhitenResult pw = prewhiten(scores);
      e = std::move(pw.residuals);
      out.prewhitening = pw.A;
      out.prewhitened = true;
      out.eigen_clamped = pw.clamped;
    } catch (const std::runtime_error&) {
      out.var_fallback = true;
    }
  }

  out.bandwidth = cfg.bandwidth_override >= 0.0 ? cfg.bandwidth_override
                                                : plug_in_bandwidth(e);

  Eigen::MatrixXd omega = gamma_j(e, 0, kt);
  if (out.bandwidth > 0.0) {
    const Eigen::Index n = e.rows();
    for (Eigen::Index j = 1; j < n; ++j) {
      const double w = qs_kernel(static_cast<double>(j) / out.bandwidth);
      const Eigen::MatrixXd g = gamma_j(e, j, kt);
      omega.noalias() += w * (g + g.transpose());
    }
  }

  if (out.prewhitened) {
    const Eigen::MatrixXd d =
        (Eigen::MatrixXd::Identity(k, k) - out.prewhitening).inverse();
    omega = d * omega * d.transpose();
  }
  omega = 0.5 * (omega + omega.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(omega);
  if (es.eigenvalues().minCoeff() < 0.0) {
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    const double tol = 1e-12 * std::max(1.0, std::abs(omega.trace()));
    if (es.eigenvalues().minCoeff() < -tol) out.psd_clipped = true;
    omega = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
    omega = 0.5 * (omega + omega.transpose()).eval();
  }
  out.covariance = std::move(omega);
  return out;
}

}  // namespace cenobreak
