#pragma once
#include <vector>

#include "cenobreak/types.hpp"

namespace cenobreak {

/// Mean-bins an irregular series onto fixed bins of width `bin_kyr` anchored
/// at age 0 (bin k covers [k·Δ, (k+1)·Δ) kyr, left-closed). Leading/trailing
/// empty bins are trimmed; interior holes are filled by interpolate_gaps and
/// flagged. Reported ages are bin centers, index 0 = oldest bin.
BinnedSeries bin_mean(const RawSeries& series, double bin_kyr);

/// Linear fill of interior NaN runs: a run of k holes between values v_a and
/// v_b gets v_a + j·(v_b − v_a)/(k+1), j = 1..k. First and last element must
/// be non-NaN. Returns the number of filled holes.
std::size_t interpolate_gaps(std::vector<double>& values);

/// Per-state descriptive statistics for contiguous states delimited by
/// strictly decreasing boundary ages (Ma). State j spans center ages in
/// (b_j, b_{j−1}]; the first state is open toward the old end, the last
/// closes at the young end. `sd` uses the n−1 divisor.
struct StateStat {
  double age_old_ma = 0.0;  ///< inclusive older limit of the state (series end or boundary)
  double age_young_ma = 0.0;///< exclusive younger limit (boundary) or series end
  double mean = 0.0, sd = 0.0, vmax = 0.0, vmin = 0.0;
  std::size_t n = 0;
};
std::vector<StateStat> state_summary(const BinnedSeries& binned,
                                     const std::vector<double>& boundaries_ma);

}  // namespace cenobreak
