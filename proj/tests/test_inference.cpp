// Information-criterion table and break-date confidence intervals.
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "cenobreak/breakpoints.hpp"
#include "cenobreak/inference.hpp"
#include "cenobreak/types.hpp"
#include "doctest.h"
#include "testutil.hpp"

using namespace cenobreak;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("information criteria match frozen oracle values") {
  // T = 100, q = 1, p = 0, SSR path {100, 50, 40}; values frozen from an
  // independent high-precision evaluation of the three formulas.
  const IcTable t = information_criteria(std::vector<double>{100.0, 50.0, 40.0}, 100, 1, 0);
  REQUIRE(t.rows.size() == 3);

  CHECK(t.rows[0].bic == doctest::Approx(0.0460517018598809).epsilon(1e-12));
  CHECK(t.rows[0].lwz == doctest::Approx(0.083923572173417).epsilon(1e-12));
  CHECK(t.rows[0].kt == doctest::Approx(0.0460517018598809).epsilon(1e-12));
  CHECK(t.rows[1].bic == doctest::Approx(-0.554992074980303).epsilon(1e-12));
  CHECK(t.rows[1].lwz == doctest::Approx(-0.44106826411549).epsilon(1e-12));
  CHECK(t.rows[1].kt == doctest::Approx(-0.601043776840183).epsilon(1e-12));
  CHECK(t.rows[2].bic == doctest::Approx(-0.68603222257475).epsilon(1e-12));
  CHECK(t.rows[2].lwz == doctest::Approx(-0.495631255887027).epsilon(1e-12));
  CHECK(t.rows[2].kt == doctest::Approx(-0.778135626294512).epsilon(1e-12));

  CHECK(t.rows[0].m == 0);
  CHECK(t.rows[2].m == 2);
  CHECK(t.rows[1].ssr == 50.0);
  CHECK(t.selected_bic == 2);
  CHECK(t.selected_lwz == 2);
  CHECK(t.selected_kt == 2);
}

TEST_CASE("the heavier LWZ penalty can stop earlier than BIC") {
  // Hand-derived: the m=1 -> 2 SSR drop ln(72/63.8) = 0.1209 clears the BIC
  // increment 2 ln(100)/100 = 0.0921 but not the LWZ increment 0.1477.
  const IcTable t = information_criteria(std::vector<double>{100.0, 72.0, 63.8}, 100, 1, 0);
  CHECK(t.selected_bic == 2);
  CHECK(t.selected_lwz == 1);
  CHECK(t.rows[1].lwz < t.rows[2].lwz);
  CHECK(t.rows[2].bic < t.rows[1].bic);
}

TEST_CASE("LWZ never selects more breaks than BIC") {
  // LWZ(m) - BIC(m) is strictly increasing in m once T > ~21 regardless of
  // the SSR path, so the first argmin of LWZ cannot exceed BIC's.
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> ssr(9);
    ssr[0] = 50.0 + 200.0 * u(rng);
    for (std::size_t m = 1; m < ssr.size(); ++m) {
      ssr[m] = ssr[m - 1] * (0.35 + 0.64 * u(rng));
    }
    const IcTable t = information_criteria(ssr, 200, 1, 0);
    CHECK(t.selected_lwz <= t.selected_bic);
  }
}

TEST_CASE("a flat SSR path selects zero breaks under every criterion") {
  const IcTable t = information_criteria(std::vector<double>{50.0, 50.0, 50.0, 50.0}, 120, 1, 0);
  CHECK(t.selected_bic == 0);
  CHECK(t.selected_lwz == 0);
  CHECK(t.selected_kt == 0);
}

TEST_CASE("non-positive SSR maps to negative infinity") {
  const IcTable t = information_criteria(std::vector<double>{100.0, 0.0}, 100, 1, 0);
  CHECK(t.rows[1].bic == -kInf);
  CHECK(t.rows[1].kt == -kInf);
  CHECK(t.rows[1].lwz == -kInf);
  CHECK(t.selected_bic == 1);
  CHECK(std::isfinite(t.rows[0].bic));
}

TEST_CASE("LWZ degenerates to +inf when parameters exhaust the sample") {
  // T = 4, q = 1, p = 0: p_m = 2m + 1 reaches 5 > T at m = 2.
  const IcTable t = information_criteria(std::vector<double>{9.0, 4.0, 2.0}, 4, 1, 0);
  CHECK(t.rows[2].lwz == kInf);
  CHECK(std::isfinite(t.rows[2].bic));
  CHECK(std::isfinite(t.rows[1].lwz));
}

TEST_CASE("the DP-output overload matches the raw-vector overload") {
  SsrByM path;
  path.optimal_ssr = {30.0, 11.0, 7.0};
  const IcTable via_spec = information_criteria(path, 80, ModelSpec::FixedAR);
  const IcTable via_raw = information_criteria(path.optimal_ssr, 80, 1, 1);
  REQUIRE(via_spec.rows.size() == via_raw.rows.size());
  for (std::size_t m = 0; m < via_raw.rows.size(); ++m) {
    CHECK(via_spec.rows[m].bic == via_raw.rows[m].bic);
    CHECK(via_spec.rows[m].lwz == via_raw.rows[m].lwz);
    CHECK(via_spec.rows[m].kt == via_raw.rows[m].kt);
  }
  // The pure-AR spec carries two breaking coefficients instead.
  const IcTable ar_spec = information_criteria(path, 80, ModelSpec::AR);
  const IcTable ar_raw = information_criteria(path.optimal_ssr, 80, 2, 0);
  CHECK(ar_spec.rows[1].bic == ar_raw.rows[1].bic);
  CHECK(ar_spec.rows[1].lwz == ar_raw.rows[1].lwz);
}

TEST_CASE("information criteria reject degenerate inputs") {
  CHECK_THROWS_AS(information_criteria(std::vector<double>{}, 100, 1, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(information_criteria(std::vector<double>{1.0}, 1, 1, 0),
                  std::invalid_argument);
}

TEST_CASE("confidence intervals bracket a well-identified mean break") {
  const std::vector<double> y =
      testutil::step_series({0.0, 5.0}, {149}, 300, 91, 0.3);
  const BreakFit fit = estimate_values(y, ModelSpec::Mean, 1, 40);
  REQUIRE(fit.m == 1);

  const auto ci95 = break_confidence_intervals(std::span<const double>(y), fit, 0.95);
  const auto ci99 = break_confidence_intervals(std::span<const double>(y), fit, 0.99);
  REQUIRE(ci95.size() == 1);
  REQUIRE(ci99.size() == 1);

  const BreakCI& a = ci95[0];
  CHECK(a.break_number == 0);
  CHECK(a.break_index == fit.break_indices[0]);
  CHECK(a.level == 0.95);
  CHECK_FALSE(a.unbounded);
  CHECK(a.lower_index <= static_cast<long>(a.break_index));
  CHECK(a.upper_index >= static_cast<long>(a.break_index));
  CHECK(a.xi > 0.0);
  CHECK(a.phi_ratio > 0.0);
  CHECK(a.scale_c > 0.0);
  // A 16-sigma jump pins the date tightly: the interval stays local.
  CHECK(a.upper_index - a.lower_index < 20);

  // The wider level nests the narrower one.
  CHECK(ci99[0].lower_index <= a.lower_index);
  CHECK(ci99[0].upper_index >= a.upper_index);
}

TEST_CASE("a vanishing coefficient change yields an unbounded interval") {
  const std::vector<double> y(60, 1.0);
  const BreakFit fit = estimate_values(y, ModelSpec::Mean, 1, 10);
  const auto cis = break_confidence_intervals(std::span<const double>(y), fit, 0.95);
  REQUIRE(cis.size() == 1);
  CHECK(cis[0].unbounded);
  CHECK(cis[0].lower_index == std::numeric_limits<long>::min());
  CHECK(cis[0].upper_index == std::numeric_limits<long>::max());
  CHECK(std::isnan(cis[0].xi));
  CHECK(std::isnan(cis[0].scale_c));
}

TEST_CASE("no breaks means no intervals") {
  const std::vector<double> y = testutil::normal_draws(80, 5, 1.0);
  const BreakFit fit = estimate_values(y, ModelSpec::Mean, 0, 10);
  CHECK(break_confidence_intervals(std::span<const double>(y), fit, 0.95).empty());
}

TEST_CASE("the confidence level must be a probability") {
  const std::vector<double> y =
      testutil::step_series({0.0, 4.0}, {99}, 200, 17, 0.4);
  const BreakFit fit = estimate_values(y, ModelSpec::Mean, 1, 30);
  const std::span<const double> sp(y);
  CHECK_THROWS_AS(break_confidence_intervals(sp, fit, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(break_confidence_intervals(sp, fit, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(break_confidence_intervals(sp, fit, -0.2), std::invalid_argument);
}

TEST_CASE("the binned overload maps index bounds to boundary ages") {
  BinnedSeries series;
  series.value = testutil::step_series({1.0, 6.0}, {199}, 400, 33, 0.35);
  series.bin_kyr = 25.0;
  series.start_age_ma = 10.0;
  series.reversed = false;
  series.n_source.assign(series.value.size(), 1);
  series.interpolated.assign(series.value.size(), 0);

  EngineOptions opt;
  opt.min_segment_obs = 40;
  const BreakFit fit = estimate(series, ModelSpec::Mean, 1, opt);
  REQUIRE(fit.m == 1);
  CHECK(fit.break_ages_ma[0] ==
        doctest::Approx(boundary_age_after(series, fit.break_indices[0])).epsilon(1e-14));

  const auto cis = break_confidence_intervals(series, fit, 0.95);
  REQUIRE(cis.size() == 1);
  const BreakCI& ci = cis[0];
  REQUIRE_FALSE(ci.unbounded);
  const double step = series.bin_kyr / 1000.0;
  CHECK(ci.lower_age_ma ==
        doctest::Approx(series.start_age_ma - (static_cast<double>(ci.lower_index) + 0.5) * step)
            .epsilon(1e-12));
  CHECK(ci.upper_age_ma ==
        doctest::Approx(series.start_age_ma - (static_cast<double>(ci.upper_index) + 0.5) * step)
            .epsilon(1e-12));
  // Ages run oldest -> youngest with the index, so the lower index is older.
  CHECK(ci.lower_age_ma >= ci.upper_age_ma);
  CHECK(ci.lower_age_ma >= fit.break_ages_ma[0]);
  CHECK(ci.upper_age_ma <= fit.break_ages_ma[0]);

  // A reversed series flips the boundary-age sign convention.
  BinnedSeries rev = series;
  rev.reversed = true;
  const BreakFit rfit = estimate(rev, ModelSpec::Mean, 1, opt);
  const auto rcis = break_confidence_intervals(rev, rfit, 0.95);
  REQUIRE(rcis.size() == 1);
  CHECK(rcis[0].lower_age_ma ==
        doctest::Approx(rev.start_age_ma +
                        (static_cast<double>(rcis[0].lower_index) + 0.5) * step)
            .epsilon(1e-12));
}
