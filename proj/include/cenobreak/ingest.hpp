#pragma once
#include <string>

#include "cenobreak/types.hpp"

namespace cenobreak {

struct LoadOptions {
  std::string age_column = "age_Ma";
  std::string value_column = "d18O_corr";
  char delimiter = '\0';  ///< '\0' = auto-detect (tab if present in header, else comma)
  std::size_t max_drop_messages = 200;
};

/// Loads an irregular series from a delimited file. Rows with a missing age
/// or value cell are dropped and counted; the result is sorted oldest to
/// youngest (descending age) with equal ages keeping file order.
/// Throws std::runtime_error on: missing file, missing column, a non-numeric
/// cell (with row number), or a negative/non-finite age.
RawSeries load_csv(const std::string& path, const LoadOptions& opt = {},
                   IngestAudit* audit = nullptr);

/// Spacing summary over consecutive *distinct* ages; observations that share
/// an age with a predecessor are counted as duplicates, not gaps.
/// Requires at least 2 observations.
GapReport gap_statistics(const RawSeries& series, double threshold_kyr = 10.0);

/// Reverses observation order; ages stay attached to their values.
RawSeries reverse_time(const RawSeries& series);

/// Reverses a binned series in place-order while keeping the index→age map
/// pointing at the same physical ages. Involution: reversing twice restores
/// the original.
BinnedSeries reverse_time(const BinnedSeries& series);

}  // namespace cenobreak
