#pragma once
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace cenobreak {

/// Irregularly sampled series: ages in Ma (million years before present) with
/// one value per observation. Order follows the source file until sorted.
struct RawSeries {
  std::vector<double> age_ma;
  std::vector<double> value;
  std::string source_label;
  std::size_t size() const { return age_ma.size(); }
};

/// Record of what load_csv kept and dropped, plus format detection results.
struct IngestAudit {
  std::size_t rows_total = 0;        ///< data rows encountered (excluding header)
  std::size_t rows_kept = 0;
  std::size_t rows_missing_value = 0;///< empty / NA cells in either column
  std::size_t rows_bad_number = 0;   ///< unparsable numeric cells
  std::vector<std::string> dropped;  ///< per-row drop messages (capped)
  std::string detected_delimiter;    ///< "," or "\t"
  std::string age_column;
  std::string value_column;
};

/// Sampling-resolution summary of a raw series (sorted by age internally).
struct GapReport {
  std::size_t n_obs = 0;
  double age_min_ma = 0.0;
  double age_max_ma = 0.0;
  double mean_gap_kyr = 0.0;          ///< mean spacing between consecutive distinct ages
  double max_gap_kyr = 0.0;
  double threshold_kyr = 10.0;
  std::size_t gaps_over_threshold = 0;
  std::size_t duplicate_instances = 0;///< observations sharing an age with a predecessor
};

/// Regular series on bins of fixed width anchored at age 0.
/// Index 0 is the oldest bin; ages decrease with index unless `reversed`.
/// Reported ages are bin centers.
struct BinnedSeries {
  std::vector<double> value;
  std::vector<std::uint8_t> interpolated; ///< 1 = filled by interpolate_gaps
  std::vector<std::uint32_t> n_source;    ///< source observations per bin
  double bin_kyr = 0.0;
  double start_age_ma = 0.0;              ///< center age of index 0
  bool reversed = false;                  ///< true after reverse_time

  std::size_t size() const { return value.size(); }
  double age_of(std::size_t i) const {
    const double step = bin_kyr / 1000.0;
    return reversed ? start_age_ma + static_cast<double>(i) * step
                    : start_age_ma - static_cast<double>(i) * step;
  }
};

/// Segmented-regression variants.
///  Mean    : value regressed on a per-regime constant.
///  FixedAR : one global AR(1) coefficient, per-regime constant.
///  AR      : per-regime constant and per-regime AR(1) coefficient.
enum class ModelSpec { Mean, FixedAR, AR };

std::string to_string(ModelSpec spec);
bool spec_from_string(const std::string& s, ModelSpec& out);

/// Number of regime-specific coefficients (q) for a spec.
inline int regime_param_count(ModelSpec spec) { return spec == ModelSpec::AR ? 2 : 1; }
/// Number of global (non-breaking) coefficients (p) for a spec.
inline int global_param_count(ModelSpec spec) { return spec == ModelSpec::FixedAR ? 1 : 0; }
/// Rows lost to lagging: specs with an AR term estimate on rows 1..T-1.
inline std::size_t sample_offset(ModelSpec spec) { return spec == ModelSpec::Mean ? 0 : 1; }

}  // namespace cenobreak
