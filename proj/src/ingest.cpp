#include "cenobreak/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cenobreak/csv.hpp"

namespace cenobreak {

RawSeries load_csv(const std::string& path, const LoadOptions& opt, IngestAudit* audit) {
  const CsvTable table = read_delimited(path, opt.delimiter);
  const auto age_col = table.column(opt.age_column);
  const auto val_col = table.column(opt.value_column);
  if (!age_col) throw std::runtime_error("column not found: " + opt.age_column);
  if (!val_col) throw std::runtime_error("column not found: " + opt.value_column);

  IngestAudit local;
  IngestAudit& a = audit ? *audit : local;
  a = IngestAudit{};
  a.detected_delimiter = std::string(1, table.delimiter);
  a.age_column = opt.age_column;
  a.value_column = opt.value_column;

  RawSeries series;
  series.source_label = path;
  series.age_ma.reserve(table.rows.size());
  series.value.reserve(table.rows.size());

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    ++a.rows_total;
    const std::size_t line_no = r + 2;  // 1-based, after the header line
    auto cell_of = [&](std::size_t col) -> const std::string& {
      static const std::string empty;
      return col < row.size() ? row[col] : empty;
    };
    bool age_missing = false, val_missing = false;
    const auto age = parse_cell(cell_of(*age_col), &age_missing);
    const auto val = parse_cell(cell_of(*val_col), &val_missing);
    if (age_missing || val_missing) {
      ++a.rows_missing_value;
      if (a.dropped.size() < opt.max_drop_messages) {
        a.dropped.push_back("line " + std::to_string(line_no) + ": missing " +
                            (age_missing ? opt.age_column : opt.value_column));
      }
      continue;
    }
    if (!age) {
      throw std::runtime_error("non-numeric cell in column " + opt.age_column +
                               " at line " + std::to_string(line_no));
    }
    if (!val) {
      throw std::runtime_error("non-numeric cell in column " + opt.value_column +
                               " at line " + std::to_string(line_no));
    }
    if (!std::isfinite(*age) || *age < 0.0) {
      throw std::runtime_error("invalid age (must be finite and >= 0) at line " +
                               std::to_string(line_no));
    }
    if (!std::isfinite(*val)) {
      throw std::runtime_error("non-finite value at line " + std::to_string(line_no));
    }
    series.age_ma.push_back(*age);
    series.value.push_back(*val);
  }
  a.rows_kept = series.size();

  // Sort oldest -> youngest; stable so simultaneous observations keep file order.
  std::vector<std::size_t> order(series.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return series.age_ma[i] > series.age_ma[j];
  });
  RawSeries sorted;
  sorted.source_label = series.source_label;
  sorted.age_ma.reserve(series.size());
  sorted.value.reserve(series.size());
  for (std::size_t i : order) {
    sorted.age_ma.push_back(series.age_ma[i]);
    sorted.value.push_back(series.value[i]);
  }
  return sorted;
}

GapReport gap_statistics(const RawSeries& series, double threshold_kyr) {
  if (series.size() < 2) throw std::runtime_error("gap_statistics needs >= 2 observations");
  GapReport rep;
  rep.n_obs = series.size();
  rep.threshold_kyr = threshold_kyr;
  const auto [mn, mx] = std::minmax_element(series.age_ma.begin(), series.age_ma.end());
  rep.age_min_ma = *mn;
  rep.age_max_ma = *mx;

  std::vector<double> ages = series.age_ma;
  std::sort(ages.begin(), ages.end(), std::greater<>());
  double sum = 0.0;
  std::size_t n_gaps = 0;
  for (std::size_t i = 1; i < ages.size(); ++i) {
    const double gap_kyr = (ages[i - 1] - ages[i]) * 1000.0;
    if (gap_kyr == 0.0) {
      ++rep.duplicate_instances;
      continue;
    }
    sum += gap_kyr;
    ++n_gaps;
    rep.max_gap_kyr = std::max(rep.max_gap_kyr, gap_kyr);
    if (gap_kyr > threshold_kyr) ++rep.gaps_over_threshold;
  }
  rep.mean_gap_kyr = n_gaps > 0 ? sum / static_cast<double>(n_gaps) : 0.0;
  return rep;
}

RawSeries reverse_time(const RawSeries& series) {
  RawSeries out = series;
  std::reverse(out.age_ma.begin(), out.age_ma.end());
  std::reverse(out.value.begin(), out.value.end());
  return out;
}

BinnedSeries reverse_time(const BinnedSeries& series) {
  BinnedSeries out = series;
  std::reverse(out.value.begin(), out.value.end());
  std::reverse(out.interpolated.begin(), out.interpolated.end());
  std::reverse(out.n_source.begin(), out.n_source.end());
  if (!series.value.empty()) out.start_age_ma = series.age_of(series.size() - 1);
  out.reversed = !series.reversed;
  return out;
}

std::string to_string(ModelSpec spec) {
  switch (spec) {
    case ModelSpec::Mean: return "mean";
    case ModelSpec::FixedAR: return "fixed-ar";
    case ModelSpec::AR: return "ar";
  }
  return "?";
}

bool spec_from_string(const std::string& s, ModelSpec& out) {
  if (s == "mean") { out = ModelSpec::Mean; return true; }
  if (s == "fixed-ar" || s == "fixedar") { out = ModelSpec::FixedAR; return true; }
  if (s == "ar") { out = ModelSpec::AR; return true; }
  return false;
}

}  // namespace cenobreak
