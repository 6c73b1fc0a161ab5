#include "cenobreak/binning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cenobreak {

BinnedSeries bin_mean(const RawSeries& series, double bin_kyr) {
  if (bin_kyr <= 0.0) throw std::runtime_error("bin size must be positive");
  if (series.size() == 0) throw std::runtime_error("cannot bin an empty series");

  // Bin index by age: k = floor(age_kyr / bin_kyr); bins nest across widths.
  std::int64_t k_min = std::numeric_limits<std::int64_t>::max();
  std::int64_t k_max = std::numeric_limits<std::int64_t>::min();
  std::vector<std::int64_t> bin_of(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto k = static_cast<std::int64_t>(std::floor(series.age_ma[i] * 1000.0 / bin_kyr));
    bin_of[i] = k;
    k_min = std::min(k_min, k);
    k_max = std::max(k_max, k);
  }
  const std::size_t n_bins = static_cast<std::size_t>(k_max - k_min + 1);

  std::vector<double> sum(n_bins, 0.0);
  std::vector<std::uint32_t> count(n_bins, 0);
  for (std::size_t i = 0; i < series.size(); ++i) {
    // Internal index 0 = oldest bin = largest k.
    const auto idx = static_cast<std::size_t>(k_max - bin_of[i]);
    sum[idx] += series.value[i];
    count[idx] += 1;
  }

  BinnedSeries out;
  out.bin_kyr = bin_kyr;
  out.value.resize(n_bins, std::numeric_limits<double>::quiet_NaN());
  out.interpolated.assign(n_bins, 0);
  out.n_source = count;
  for (std::size_t i = 0; i < n_bins; ++i) {
    if (count[i] > 0) out.value[i] = sum[i] / static_cast<double>(count[i]);
  }
  // Leading/trailing bins are non-empty by construction (k_min/k_max touched),
  // so only interior holes remain.
  const std::size_t filled = interpolate_gaps(out.value);
  for (std::size_t i = 0; i < n_bins; ++i) {
    if (count[i] == 0) out.interpolated[i] = 1;
  }
  (void)filled;
  out.start_age_ma = (static_cast<double>(k_max) + 0.5) * bin_kyr / 1000.0;
  return out;
}

std::size_t interpolate_gaps(std::vector<double>& values) {
  const std::size_t n = values.size();
  if (n == 0) throw std::runtime_error("interpolate_gaps: empty input");
  if (std::isnan(values.front()) || std::isnan(values.back())) {
    throw std::runtime_error("interpolate_gaps: endpoints must be non-empty");
  }
  std::size_t filled = 0;
  std::size_t i = 1;
  while (i < n) {
    if (!std::isnan(values[i])) { ++i; continue; }
    const std::size_t run_start = i;
    while (std::isnan(values[i])) ++i;  // terminates: last element is non-NaN
    const std::size_t run_end = i;      // first non-NaN after the run
    const double va = values[run_start - 1];
    const double vb = values[run_end];
    const auto k = static_cast<double>(run_end - run_start + 1);
    for (std::size_t j = run_start; j < run_end; ++j) {
      const auto step = static_cast<double>(j - run_start + 1);
      values[j] = va + step * (vb - va) / k;
      ++filled;
    }
  }
  return filled;
}

std::vector<StateStat> state_summary(const BinnedSeries& binned,
                                     const std::vector<double>& boundaries_ma) {
  const std::size_t n = binned.size();
  if (n == 0) throw std::runtime_error("state_summary: empty series");
  double age_old = binned.age_of(0), age_young = binned.age_of(n - 1);
  if (age_old < age_young) std::swap(age_old, age_young);
  for (std::size_t i = 0; i < boundaries_ma.size(); ++i) {
    if (i > 0 && !(boundaries_ma[i] < boundaries_ma[i - 1])) {
      throw std::runtime_error("state boundaries must be strictly decreasing");
    }
    if (boundaries_ma[i] <= age_young || boundaries_ma[i] >= age_old) {
      throw std::runtime_error("state boundary outside series span");
    }
  }

  const std::size_t n_states = boundaries_ma.size() + 1;
  std::vector<StateStat> stats(n_states);
  std::vector<std::vector<double>> members(n_states);
  for (std::size_t i = 0; i < n; ++i) {
    const double age = binned.age_of(i);
    // State s: center ages in (b_s, b_{s-1}]; b_0 = +inf, b_{n_states} = -inf.
    std::size_t s = 0;
    while (s < boundaries_ma.size() && age <= boundaries_ma[s]) ++s;
    members[s].push_back(binned.value[i]);
  }
  for (std::size_t s = 0; s < n_states; ++s) {
    auto& st = stats[s];
    st.age_old_ma = s == 0 ? age_old : boundaries_ma[s - 1];
    st.age_young_ma = s == boundaries_ma.size() ? age_young : boundaries_ma[s];
    const auto& v = members[s];
    st.n = v.size();
    if (v.empty()) continue;
    double sum = 0.0;
    st.vmax = v.front();
    st.vmin = v.front();
    for (double x : v) {
      sum += x;
      st.vmax = std::max(st.vmax, x);
      st.vmin = std::min(st.vmin, x);
    }
    st.mean = sum / static_cast<double>(v.size());
    if (v.size() > 1) {
      double ss = 0.0;
      for (double x : v) ss += (x - st.mean) * (x - st.mean);
      st.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
  }
  return stats;
}

}  // namespace cenobreak
