// Segment least-squares oracles: prefix-moment costs, the materialized SSR
// table, partition fits, and the joint partial-change regression are all
// checked against direct dense solves built independently here.
#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "cenobreak/regression.hpp"
#include "doctest.h"
#include "testutil.hpp"

using namespace cenobreak;

namespace {

// Direct OLS SSR of resp[i..j] on a column of ones (q = 1).
double brute_ssr_mean(const std::vector<double>& r, std::size_t i, std::size_t j) {
  const auto n = static_cast<Eigen::Index>(j - i + 1);
  Eigen::VectorXd y(n);
  for (Eigen::Index k = 0; k < n; ++k) y(k) = r[i + static_cast<std::size_t>(k)];
  const double mean = y.mean();
  return (y.array() - mean).matrix().squaredNorm();
}

// Direct OLS SSR of resp[i..j] on (1, lag) via Householder QR (q = 2).
double brute_ssr_slope(const std::vector<double>& resp, const std::vector<double>& lag,
                       std::size_t i, std::size_t j) {
  const auto n = static_cast<Eigen::Index>(j - i + 1);
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    X(k, 0) = 1.0;
    X(k, 1) = lag[i + static_cast<std::size_t>(k)];
    y(k) = resp[i + static_cast<std::size_t>(k)];
  }
  const Eigen::VectorXd coef = X.colPivHouseholderQr().solve(y);
  return (y - X * coef).squaredNorm();
}

}  // namespace

TEST_CASE("design_rows shapes the estimation sample per spec") {
  const std::vector<double> y{1.0, 2.0, 3.0, 4.0};

  const Design mean = design_rows(y, ModelSpec::Mean);
  CHECK(mean.offset == 0);
  CHECK(mean.rows() == 4);
  CHECK(mean.lag.empty());
  CHECK(mean.q() == 1);
  CHECK(mean.p() == 0);

  for (const ModelSpec spec : {ModelSpec::FixedAR, ModelSpec::AR}) {
    const Design d = design_rows(y, spec);
    CHECK(d.offset == 1);
    REQUIRE(d.rows() == 3);
    CHECK(d.resp == std::vector<double>{2.0, 3.0, 4.0});
    CHECK(d.lag == std::vector<double>{1.0, 2.0, 3.0});
  }
  CHECK(design_rows(y, ModelSpec::AR).q() == 2);
  CHECK(design_rows(y, ModelSpec::FixedAR).p() == 1);

  const std::vector<double> one{1.0};
  CHECK_THROWS_AS((void)design_rows(one, ModelSpec::AR), std::exception);
  CHECK_NOTHROW((void)design_rows(one, ModelSpec::Mean));
}

TEST_CASE("prefix-moment mean cost equals dense OLS on every segment") {
  const std::vector<double> y = testutil::normal_draws(40, 11);
  const SegmentCost cost = SegmentCost::mean(y);
  REQUIRE(cost.rows() == 40);
  for (std::size_t i = 0; i < 40; ++i) {
    for (std::size_t j = i; j < 40; ++j) {
      const double got = cost.ssr(i, j);
      const double want = brute_ssr_mean(y, i, j);
      CHECK(testutil::rel_diff(got, want) < 1e-10);
      CHECK(got >= 0.0);  // clamped even when cancellation would go negative
    }
  }
}

TEST_CASE("prefix-moment slope cost equals dense OLS on every admissible segment") {
  std::vector<double> y = testutil::normal_draws(32, 13);
  for (std::size_t i = 1; i < y.size(); ++i) y[i] += 0.6 * y[i - 1];
  const Design d = design_rows(y, ModelSpec::AR);
  const SegmentCost cost = SegmentCost::intercept_slope(d.resp, d.lag);
  for (std::size_t i = 0; i < d.rows(); ++i) {
    for (std::size_t j = i + 1; j < d.rows(); ++j) {  // need 2 rows for q = 2
      const double got = cost.ssr(i, j);
      const double want = brute_ssr_slope(d.resp, d.lag, i, j);
      CHECK(testutil::rel_diff(got, want) < 1e-8);
    }
  }
}

TEST_CASE("a constant regressor makes the slope cost infinite") {
  std::vector<double> y(12, 5.0);
  const std::vector<double> tail = testutil::normal_draws(8, 17);
  y.insert(y.end(), tail.begin(), tail.end());
  const Design d = design_rows(y, ModelSpec::AR);
  const SegmentCost cost = SegmentCost::intercept_slope(d.resp, d.lag);
  // Rows 0..8 all have lag = 5.0 exactly.
  CHECK(cost.ssr(0, 8) == std::numeric_limits<double>::infinity());
  // A segment reaching into the random tail is identified again.
  CHECK(std::isfinite(cost.ssr(5, d.rows() - 1)));
}

TEST_CASE("materialized SSR table matches the prefix-moment cost") {
  std::vector<double> y = testutil::normal_draws(30, 19);
  for (std::size_t i = 1; i < y.size(); ++i) y[i] += 0.4 * y[i - 1];

  for (const ModelSpec spec : {ModelSpec::Mean, ModelSpec::AR}) {
    const Design d = design_rows(y, spec);
    GlobalCoefficients none;
    const SegmentCost cost = make_segment_cost(d, none);
    const SsrTable table = segment_ssr_table(d, none);
    REQUIRE(table.n() == d.rows());
    for (std::size_t i = 0; i < d.rows(); ++i) {
      for (std::size_t j = i; j < d.rows(); ++j) {
        const double a = cost.ssr(i, j);
        const double b = table.at(i, j);
        if (std::isinf(a) || std::isinf(b)) {
          CHECK(std::isinf(a));
          CHECK(std::isinf(b));
        } else {
          CHECK(testutil::rel_diff(a, b) < 1e-9);
        }
      }
    }
  }
}

TEST_CASE("FixedAR cost adjusts the response by beta before the mean fit") {
  std::vector<double> y = testutil::normal_draws(25, 23);
  const Design d = design_rows(y, ModelSpec::FixedAR);
  GlobalCoefficients beta;
  beta.beta = {0.37};
  const SegmentCost cost = make_segment_cost(d, beta);
  std::vector<double> adjusted(d.rows());
  for (std::size_t t = 0; t < d.rows(); ++t) adjusted[t] = d.resp[t] - 0.37 * d.lag[t];
  for (std::size_t i = 0; i < d.rows(); i += 3) {
    for (std::size_t j = i; j < d.rows(); j += 2) {
      CHECK(testutil::rel_diff(cost.ssr(i, j), brute_ssr_mean(adjusted, i, j)) < 1e-10);
    }
  }
}

TEST_CASE("fit_segments is additive and matches per-segment OLS") {
  std::vector<double> y =
      testutil::step_series({0.0, 3.0, -1.0}, {9, 19}, 30, 29, 0.5);
  const Design d = design_rows(y, ModelSpec::Mean);
  const std::vector<std::size_t> breaks{9, 19};
  const PartitionFit fit = fit_segments(d, breaks, {});
  REQUIRE(fit.segments.size() == 3);

  double sum = 0.0;
  for (const SegmentFit& seg : fit.segments) {
    REQUIRE(seg.delta.size() == 1);
    const double want = brute_ssr_mean(y, seg.start, seg.end);
    CHECK(testutil::rel_diff(seg.ssr, want) < 1e-10);
    // delta is the segment mean for the Mean spec.
    double mean = 0.0;
    for (std::size_t t = seg.start; t <= seg.end; ++t) mean += y[t];
    mean /= static_cast<double>(seg.end - seg.start + 1);
    CHECK(seg.delta[0] == doctest::Approx(mean).epsilon(1e-10));
    const auto len = static_cast<double>(seg.end - seg.start + 1);
    CHECK(seg.sigma2 == doctest::Approx(seg.ssr / (len - 1.0)).epsilon(1e-12));
    sum += seg.ssr;
  }
  CHECK(fit.total_ssr == doctest::Approx(sum).epsilon(1e-12));
  CHECK(fit.segments[0].start == 0);
  CHECK(fit.segments[0].end == 9);
  CHECK(fit.segments[1].start == 10);
  CHECK(fit.segments[2].end == 29);
}

TEST_CASE("AR-spec fit_segments returns per-regime intercept and slope") {
  std::vector<double> y(60);
  const std::vector<double> e = testutil::normal_draws(60, 31, 0.3);
  y[0] = e[0];
  for (std::size_t t = 1; t < 30; ++t) y[t] = 1.0 + 0.5 * y[t - 1] + e[t];
  for (std::size_t t = 30; t < 60; ++t) y[t] = 4.0 + 0.2 * y[t - 1] + e[t];
  const Design d = design_rows(y, ModelSpec::AR);
  const PartitionFit fit = fit_segments(d, {28}, {});
  REQUIRE(fit.segments.size() == 2);
  for (const SegmentFit& seg : fit.segments) {
    REQUIRE(seg.delta.size() == 2);
    const double want = brute_ssr_slope(d.resp, d.lag, seg.start, seg.end);
    CHECK(testutil::rel_diff(seg.ssr, want) < 1e-8);
    // Residual of the reported coefficients reproduces the SSR.
    double ssr = 0.0;
    for (std::size_t t = seg.start; t <= seg.end; ++t) {
      const double r = d.resp[t] - seg.delta[0] - seg.delta[1] * d.lag[t];
      ssr += r * r;
    }
    CHECK(testutil::rel_diff(ssr, seg.ssr) < 1e-8);
  }
}

TEST_CASE("joint partial-change regression agrees with a dense solve") {
  std::vector<double> y(80);
  const std::vector<double> e = testutil::normal_draws(80, 37, 0.4);
  y[0] = e[0];
  for (std::size_t t = 1; t < 40; ++t) y[t] = 0.5 + 0.6 * y[t - 1] + e[t];
  for (std::size_t t = 40; t < 80; ++t) y[t] = 2.5 + 0.6 * y[t - 1] + e[t];
  const Design d = design_rows(y, ModelSpec::FixedAR);
  const std::vector<std::size_t> breaks{38};
  const JointFixedArFit jf = joint_fixed_ar_fit(d, breaks);

  const auto n = static_cast<Eigen::Index>(d.rows());
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, 3);
  Eigen::VectorXd yy(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    const auto tt = static_cast<std::size_t>(t);
    X(t, 0) = d.lag[tt];
    X(t, tt <= 38 ? 1 : 2) = 1.0;
    yy(t) = d.resp[tt];
  }
  const Eigen::VectorXd coef = X.colPivHouseholderQr().solve(yy);
  const double ssr = (yy - X * coef).squaredNorm();
  CHECK(jf.phi == doctest::Approx(coef(0)).epsilon(1e-9));
  REQUIRE(jf.intercepts.size() == 2);
  CHECK(jf.intercepts[0] == doctest::Approx(coef(1)).epsilon(1e-9));
  CHECK(jf.intercepts[1] == doctest::Approx(coef(2)).epsilon(1e-9));
  CHECK(testutil::rel_diff(jf.ssr, ssr) < 1e-10);

  const Eigen::MatrixXd xtx_inv = (X.transpose() * X).inverse();
  const double want_var = ssr / (static_cast<double>(n) - 3.0) * xtx_inv(0, 0);
  CHECK(jf.phi_var_ols == doctest::Approx(want_var).epsilon(1e-8));
}

TEST_CASE("ols helper solves the normal equations") {
  Eigen::MatrixXd X(4, 2);
  X << 1, 0, 1, 1, 1, 2, 1, 3;
  Eigen::VectorXd y(4);
  y << 1.0, 2.9, 5.1, 7.0;
  const OlsFit f = ols(X, y);
  // Closed form on t = 0..3: mean 4, slope 10.1/5, intercept 4 - 1.5*slope.
  CHECK(f.coef(1) == doctest::Approx(2.02).epsilon(1e-9));
  CHECK(f.coef(0) == doctest::Approx(0.97).epsilon(1e-9));
  CHECK(f.ssr == doctest::Approx((y - X * f.coef).squaredNorm()).epsilon(1e-12));
  const Eigen::MatrixXd id = f.xtx_inv * (X.transpose() * X);
  CHECK((id - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-10);
}

TEST_CASE("minimum state length converts from Myr by rounding") {
  CHECK(min_segment_obs_from_h(2.5, 25.0) == 100);
  CHECK(min_segment_obs_from_h(2.5, 10.0) == 250);
  CHECK(min_segment_obs_from_h(1.0, 25.0) == 40);
  CHECK(min_segment_obs_from_h(1.0, 5.0) == 200);
  CHECK(min_segment_obs_from_h(0.03, 25.0) == 1);  // round(1.2) -> 1
  CHECK(min_segment_obs_from_h(0.0001, 25.0) == 1);  // floor at one observation
  CHECK_THROWS_AS((void)min_segment_obs_from_h(0.0, 25.0), std::runtime_error);
}
