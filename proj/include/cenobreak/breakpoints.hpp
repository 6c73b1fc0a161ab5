#pragma once
#include <functional>
#include <span>
#include <vector>

#include "cenobreak/regression.hpp"
#include "cenobreak/types.hpp"

namespace cenobreak {

/// Optimal SSR and partition for every break count m = 0..max_feasible_m.
/// Break lists hold the last row of each regime except the final one
/// (estimation-sample scale, strictly increasing).
struct SsrByM {
  std::vector<double> optimal_ssr;
  std::vector<std::vector<std::size_t>> optimal_breaks;
  std::size_t max_feasible_m() const { return optimal_ssr.empty() ? 0 : optimal_ssr.size() - 1; }
};

/// Global SSR minimization over partitions with segments >= min_len, for all
/// m <= max_m, by the O(T^2) Bellman recursion over optimal suffixes. Ties
/// resolve toward the earliest break dates (the first break is minimized
/// first). If max_m is infeasible for the sample, results stop at the
/// largest feasible m. SSR is non-increasing in m whenever every optimal
/// partition retains a splittable segment (guaranteed for n >= 2(m+1)·min_len).
SsrByM dp_global_breaks(const SegmentCost& cost, std::size_t max_m, std::size_t min_len,
                        KernelKind kernel = KernelKind::Auto);

/// Same recursion reading a materialized triangular SSR table.
SsrByM dp_global_breaks(const SsrTable& table, std::size_t max_m, std::size_t min_len);

/// Engine configuration. The user-facing knobs (minimum state length h,
/// iteration controls for the partial-change model, kernel choice).
struct EngineOptions {
  double h_myr = 2.5;               ///< minimum state length in Myr
  std::size_t min_segment_obs = 0;  ///< overrides h_myr when nonzero
  std::size_t max_breaks = 0;       ///< 0 = floor(rows/min_len) - 1, capped at 26
  double fixed_ar_tol = 1e-8;       ///< relative SSR change declaring convergence
  int fixed_ar_max_iter = 100;
  KernelKind kernel = KernelKind::Auto;
};

inline constexpr std::size_t kMaxBreaksCap = 26;

/// A fitted break model.
struct BreakFit {
  ModelSpec spec = ModelSpec::Mean;
  std::size_t m = 0;
  std::vector<std::size_t> break_indices;  ///< original-index scale, last bin of each regime
  std::vector<double> break_ages_ma;       ///< regime-boundary ages; empty without an age map
  std::vector<SegmentFit> segments;        ///< estimation-sample row ranges
  GlobalCoefficients beta;                 ///< {phi} for FixedAR
  double beta_se_ols = 0.0;                ///< OLS standard error of phi (FixedAR)
  double total_ssr = 0.0;
  bool converged = true;
  int iterations = 0;
  std::size_t min_segment_obs = 0;
  std::size_t sample_rows = 0;             ///< estimation rows (T or T-1)
};

/// Estimates an m-break model on raw values (no age map). min_len is the
/// minimum segment length in estimation rows.
BreakFit estimate_values(std::span<const double> y, ModelSpec spec, std::size_t m,
                         std::size_t min_len, const EngineOptions& opt = {});

/// Estimates on a binned series; min_len derives from opt (h_myr and the bin
/// width unless min_segment_obs is set) and break ages are attached using the
/// series' index→age map (reported at the regime boundary between bins).
BreakFit estimate(const BinnedSeries& series, ModelSpec spec, std::size_t m,
                  const EngineOptions& opt = {});

/// One fit per m in 0..m_max (all from a single DP pass for pure structural
/// change; per-m iteration for FixedAR).
std::vector<BreakFit> estimate_all(const BinnedSeries& series, ModelSpec spec,
                                   std::size_t m_max, const EngineOptions& opt = {});
std::vector<BreakFit> estimate_all_values(std::span<const double> y, ModelSpec spec,
                                          std::size_t m_max, std::size_t min_len,
                                          const EngineOptions& opt = {});

/// Spec-shaped path op: fits for m = 1..m_max.
std::vector<BreakFit> estimate_path(const BinnedSeries& series, ModelSpec spec,
                                    std::size_t m_max, const EngineOptions& opt = {});

/// Regime boundary age between bin i and bin i+1 (midpoint of centers).
double boundary_age_after(const BinnedSeries& series, std::size_t i);

/// Effective minimum segment length for a series/spec under the options.
std::size_t resolve_min_len(const BinnedSeries& series, const EngineOptions& opt);

}  // namespace cenobreak
