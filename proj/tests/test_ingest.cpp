// Loading, auditing, gap reporting, and order reversal of raw series.
#include <stdexcept>

#include "cenobreak/ingest.hpp"
#include "doctest.h"
#include "testutil.hpp"

using namespace cenobreak;
using testutil::TempDir;

namespace {

std::string sample_csv() {
  // Deliberately unsorted, with NA cells and a duplicate age.
  return "age_Ma\td18O_corr\textra\n"
         "10.0\t1.0\tx\n"
         "10.5\t2.0\tx\n"
         "NA\t3.0\tx\n"
         "9.5\t\tx\n"
         "10.5\t2.5\tx\n"
         "9.0\t4.0\tx\n";
}

}  // namespace

TEST_CASE("load_csv sorts oldest-first and keeps file order for equal ages") {
  TempDir dir;
  const std::string path = dir.file("raw.tsv");
  testutil::write_text(path, sample_csv());

  IngestAudit audit;
  const RawSeries s = load_csv(path, {}, &audit);
  REQUIRE(s.size() == 4);
  CHECK(s.age_ma[0] == doctest::Approx(10.5));
  CHECK(s.age_ma[1] == doctest::Approx(10.5));
  CHECK(s.age_ma[2] == doctest::Approx(10.0));
  CHECK(s.age_ma[3] == doctest::Approx(9.0));
  // Stable: the 2.0 observation precedes 2.5 as in the file.
  CHECK(s.value[0] == doctest::Approx(2.0));
  CHECK(s.value[1] == doctest::Approx(2.5));

  CHECK(audit.rows_total == 6);
  CHECK(audit.rows_kept == 4);
  CHECK(audit.rows_missing_value == 2);
  CHECK(audit.detected_delimiter == "\t");
  REQUIRE(audit.dropped.size() == 2);
  CHECK(audit.dropped[0].find("line 4") != std::string::npos);
  CHECK(audit.dropped[1].find("line 5") != std::string::npos);
}

TEST_CASE("load_csv rejects missing columns, bad numbers, and bad ages") {
  TempDir dir;
  const std::string path = dir.file("raw.csv");

  testutil::write_text(path, "age_Ma,d18O_corr\n1.0,2.0\n");
  LoadOptions opt;
  opt.value_column = "nope";
  CHECK_THROWS_WITH_AS((void)load_csv(path, opt), doctest::Contains("nope"),
                       std::runtime_error);

  testutil::write_text(path, "age_Ma,d18O_corr\n1.0,2.0\nbogus,3.0\n");
  CHECK_THROWS_WITH_AS((void)load_csv(path), doctest::Contains("line 3"),
                       std::runtime_error);

  testutil::write_text(path, "age_Ma,d18O_corr\n-1.0,2.0\n");
  CHECK_THROWS_AS((void)load_csv(path), std::runtime_error);

  testutil::write_text(path, "age_Ma,d18O_corr\n1.0,inf\n");
  CHECK_THROWS_AS((void)load_csv(path), std::runtime_error);

  CHECK_THROWS_AS((void)load_csv(dir.file("missing.csv")), std::runtime_error);
}

TEST_CASE("load_csv honors custom column names") {
  TempDir dir;
  const std::string path = dir.file("cols.csv");
  testutil::write_text(path, "t,v\n2.0,5.0\n1.0,6.0\n");
  LoadOptions opt;
  opt.age_column = "t";
  opt.value_column = "v";
  const RawSeries s = load_csv(path, opt);
  REQUIRE(s.size() == 2);
  CHECK(s.age_ma[0] == doctest::Approx(2.0));
  CHECK(s.value[0] == doctest::Approx(5.0));
}

TEST_CASE("gap_statistics counts duplicates separately from gaps") {
  RawSeries s;
  s.age_ma = {10.0, 9.99, 9.99, 9.97};  // gaps: 10 kyr, (dup), 20 kyr
  s.value = {1, 2, 3, 4};
  const GapReport rep = gap_statistics(s, 10.0);
  CHECK(rep.n_obs == 4);
  CHECK(rep.age_min_ma == doctest::Approx(9.97));
  CHECK(rep.age_max_ma == doctest::Approx(10.0));
  CHECK(rep.duplicate_instances == 1);
  CHECK(rep.mean_gap_kyr == doctest::Approx(15.0));
  CHECK(rep.max_gap_kyr == doctest::Approx(20.0));
  CHECK(rep.gaps_over_threshold == 1);  // strictly greater than the threshold

  RawSeries tiny;
  tiny.age_ma = {1.0};
  tiny.value = {1.0};
  CHECK_THROWS_AS((void)gap_statistics(tiny), std::runtime_error);
}

TEST_CASE("gap_statistics does not require sorted input") {
  RawSeries s;
  s.age_ma = {9.97, 10.0, 9.99};
  s.value = {1, 2, 3};
  const GapReport rep = gap_statistics(s, 5.0);
  CHECK(rep.mean_gap_kyr == doctest::Approx(15.0));
  CHECK(rep.gaps_over_threshold == 2);
}

TEST_CASE("reverse_time on a raw series is an involution that keeps pairs") {
  RawSeries s;
  s.age_ma = {3.0, 2.0, 1.0};
  s.value = {30.0, 20.0, 10.0};
  const RawSeries r = reverse_time(s);
  CHECK(r.age_ma.front() == doctest::Approx(1.0));
  CHECK(r.value.front() == doctest::Approx(10.0));
  const RawSeries rr = reverse_time(r);
  CHECK(rr.age_ma == s.age_ma);
  CHECK(rr.value == s.value);
}

TEST_CASE("reverse_time on a binned series preserves the physical age of each value") {
  BinnedSeries b;
  b.value = {5.0, 6.0, 7.0, 8.0};
  b.interpolated = {0, 1, 0, 0};
  b.n_source = {2, 0, 1, 3};
  b.bin_kyr = 25.0;
  b.start_age_ma = 1.0;
  b.reversed = false;

  const BinnedSeries r = reverse_time(b);
  CHECK(r.reversed);
  REQUIRE(r.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    const std::size_t j = 3 - i;
    CHECK(r.value[i] == b.value[j]);
    CHECK(r.interpolated[i] == b.interpolated[j]);
    CHECK(r.n_source[i] == b.n_source[j]);
    CHECK(r.age_of(i) == doctest::Approx(b.age_of(j)).epsilon(1e-12));
  }

  const BinnedSeries rr = reverse_time(r);
  CHECK_FALSE(rr.reversed);
  CHECK(rr.value == b.value);
  CHECK(rr.start_age_ma == doctest::Approx(b.start_age_ma));
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(rr.age_of(i) == doctest::Approx(b.age_of(i)).epsilon(1e-12));
  }
}
