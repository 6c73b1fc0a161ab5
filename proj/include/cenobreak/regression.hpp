#pragma once
#include <Eigen/Dense>
#include <limits>
#include <span>
#include <vector>

#include "cenobreak/kernels.hpp"
#include "cenobreak/types.hpp"

namespace cenobreak {

/// One regime's least-squares fit.
struct SegmentFit {
  std::size_t start = 0;        ///< first row (estimation-sample scale, 0-based)
  std::size_t end = 0;          ///< last row, inclusive
  std::vector<double> delta;    ///< c_j for Mean/FixedAR; (c_j, phi_j) for AR
  double sigma2 = 0.0;          ///< ssr / (length - q)
  double ssr = 0.0;
  bool degenerate = false;
};

/// State-independent coefficients: {phi} for FixedAR, empty otherwise.
struct GlobalCoefficients {
  std::vector<double> beta;
};

/// Estimation-sample view of a series under a spec. Lag-using specs drop the
/// first observation: row r corresponds to original index r + offset.
struct Design {
  ModelSpec spec = ModelSpec::Mean;
  std::size_t offset = 0;     ///< original index of row 0
  std::vector<double> resp;   ///< y_t
  std::vector<double> lag;    ///< y_{t-1}; empty for Mean

  std::size_t rows() const { return resp.size(); }
  int q() const { return regime_param_count(spec); }
  int p() const { return global_param_count(spec); }
};

/// Builds the estimation rows for a spec. AR kinds need length >= 2.
Design design_rows(std::span<const double> y, ModelSpec spec);

/// O(1)-per-query segment SSR from prefix moments. For FixedAR the response
/// must already be adjusted (y_t - beta * y_{t-1}), making the per-segment
/// problem a mean fit (q = 1).
class SegmentCost {
 public:
  /// Mean fit on `r` (q = 1).
  static SegmentCost mean(std::span<const double> r);
  /// Intercept + slope fit of resp on lag (q = 2).
  static SegmentCost intercept_slope(std::span<const double> resp, std::span<const double> lag);

  /// SSR of rows [i, j]; +infinity when the segment's moment matrix is
  /// degenerate (condition > 1e12).
  double ssr(std::size_t i, std::size_t j) const;

  std::size_t rows() const { return n_; }
  int q() const { return q_; }

  kernels::Q1View q1_view() const { return {sy_.data(), syy_.data()}; }
  kernels::Q2View q2_view() const {
    return {sy_.data(), syy_.data(), sw_.data(), sww_.data(), swy_.data()};
  }

 private:
  std::size_t n_ = 0;
  int q_ = 1;
  std::vector<double> sy_, syy_, sw_, sww_, swy_;  // prefix moments, length n+1
};

/// Builds the cost object for a design given fixed global coefficients.
SegmentCost make_segment_cost(const Design& design, const GlobalCoefficients& beta);

/// Materialized triangular SSR table over all segments of length >= q,
/// filled by add-one-observation moment updates (O(1) per entry). Degenerate
/// segments hold +infinity; segments shorter than q hold +infinity.
class SsrTable {
 public:
  SsrTable(std::size_t n, int q) : n_(n), q_(q),
      data_(n * (n + 1) / 2, std::numeric_limits<double>::infinity()) {}
  double at(std::size_t i, std::size_t j) const { return data_[index(i, j)]; }
  double& at(std::size_t i, std::size_t j) { return data_[index(i, j)]; }
  std::size_t n() const { return n_; }
  int q() const { return q_; }

 private:
  std::size_t index(std::size_t i, std::size_t j) const {
    return i * n_ - i * (i - 1) / 2 + (j - i);
  }
  std::size_t n_;
  int q_;
  std::vector<double> data_;
};

/// Spec-shaped table builder: SSR of regressing (resp - x'beta) on z over
/// every admissible [i, j].
SsrTable segment_ssr_table(const Design& design, const GlobalCoefficients& beta);

/// Per-segment fits for a given partition. `breaks` lists the last row of
/// each regime except the final one (estimation-sample scale, strictly
/// increasing). For FixedAR pass the beta the adjustment should use; for
/// Mean/AR beta is ignored.
struct PartitionFit {
  std::vector<SegmentFit> segments;
  double total_ssr = 0.0;
};
PartitionFit fit_segments(const Design& design, const std::vector<std::size_t>& breaks,
                          const GlobalCoefficients& beta);

/// Joint OLS of the FixedAR model for a fixed partition: regresses y_t on
/// y_{t-1} plus one dummy per regime. Returns beta = {phi}, the per-regime
/// intercepts, the residual SSR, and the OLS variance of phi.
struct JointFixedArFit {
  double phi = 0.0;
  double phi_var_ols = 0.0;
  std::vector<double> intercepts;
  double ssr = 0.0;
};
JointFixedArFit joint_fixed_ar_fit(const Design& design, const std::vector<std::size_t>& breaks);

/// Dense OLS helper (column-pivoted to the normal equations via LDLT).
struct OlsFit {
  Eigen::VectorXd coef;
  Eigen::VectorXd resid;
  Eigen::MatrixXd xtx_inv;
  double ssr = 0.0;
};
OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

/// Converts a minimum state length in Myr to observations: round(h·1000/Δ).
std::size_t min_segment_obs_from_h(double h_myr, double bin_kyr);

}  // namespace cenobreak
