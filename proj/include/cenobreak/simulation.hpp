#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cenobreak/kernels.hpp"
#include "cenobreak/types.hpp"

namespace cenobreak {

enum class ErrorKind { Iid, Arma };

/// One-break (or no-break) autoregressive data-generating process:
///   y_t = c1 + phi1 y_{t-1} + eps_t   for t <= break_at
///   y_t = c2 + phi2 y_{t-1} + eps_t   for t >  break_at
/// with y_0 = 0 and t = 1..T. Errors are i.i.d. Normal(0, sigma^2) or the
/// ARMA(1,1) recursion eps_t = psi eps_{t-1} + theta eta_{t-1} + eta_t with
/// sigma_eta^2 = sigma^2 (1 - psi^2)/(1 + theta^2 + 2 psi theta), so that the
/// stationary sd of eps matches sigma; (eps_0, eta_0) start at stationarity.
struct DgpConfig {
  double sigma = 1.0;
  double c1 = 0.1;
  double c2 = 1.0;
  double phi1 = 1.0;
  double phi2 = 1.0;
  std::size_t T = 500;
  std::size_t break_at = 250;
  ErrorKind error_kind = ErrorKind::Iid;
  double psi = 0.5;    ///< ARMA AR coefficient
  double theta = 0.5;  ///< ARMA MA coefficient

  /// True break count implied by the parameters (0 when both regimes match).
  std::size_t true_breaks() const {
    return (c1 == c2 && phi1 == phi2) ? 0 : 1;
  }
};

/// The eight study designs (id 1..8); `serial_errors` switches the error
/// recursion to ARMA(1,1) with psi = theta = 0.5.
DgpConfig dgp_preset(int id, bool serial_errors = false);

/// Standard-normal sampler: mt19937_64 + the polar method, fully specified by
/// the C++ standard, hence reproducible across platforms and compilers.
class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}
  double operator()();

 private:
  std::mt19937_64 rng_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

/// Simulates one path of length T for the given seed.
std::vector<double> generate(const DgpConfig& dgp, std::uint64_t seed);

enum class StudyMode { FixedM, SelectM };

/// Monte Carlo study configuration. Replication r uses seed `seed + r`.
struct StudyConfig {
  DgpConfig dgp;
  ModelSpec spec = ModelSpec::FixedAR;
  StudyMode mode = StudyMode::FixedM;
  std::size_t replications = 1000;
  std::uint64_t seed = 1;
  std::size_t m_fixed = 1;   ///< imposed break count (FixedM mode)
  std::size_t m_max = 3;     ///< selection cap (SelectM mode)
  std::size_t min_len = 25;  ///< minimum regime length in estimation rows
  double ci_level = 0.95;
};

/// One replication's outcome. Break dates and CI bounds are reported in
/// 1-based time units t = 1..T (the true break is at t = break_at).
struct Replication {
  std::size_t rep = 0;
  bool ok = true;
  std::string error;
  std::vector<long> breaks;
  long ci_lower = 0;
  long ci_upper = 0;
  bool ci_unbounded = false;
  bool covered = false;
  long m_bic = -1;
  long m_lwz = -1;
  long m_kt = -1;
};

/// Study outcome: raw replications plus deterministic aggregates (failures
/// excluded, count reported). Aggregates are NaN where the mode leaves them
/// undefined.
struct StudyResult {
  StudyConfig config;
  std::vector<Replication> replications;
  std::size_t failures = 0;
  // FixedM aggregates (first break)
  double mean_break = 0.0;
  double median_lower = 0.0;
  double median_upper = 0.0;
  double coverage = 0.0;
  // SelectM aggregates
  double mean_m_bic = 0.0;
  double mean_m_lwz = 0.0;
  double mean_m_kt = 0.0;
  double correct_bic = 0.0;  ///< share selecting the true break count
  double correct_lwz = 0.0;
  double correct_kt = 0.0;
  std::vector<double> share_m_bic;  ///< share selecting m, size m_max + 1
  std::vector<double> share_m_lwz;
  std::vector<double> share_m_kt;
};

/// Runs the study single-threaded in replication order.
StudyResult run_study(const StudyConfig& cfg, KernelKind kernel = KernelKind::Auto);

/// Histogram (and Gaussian kernel density, Silverman bandwidth) of estimated
/// break dates over t = 1..T. Requires >= 2 successful replications with at
/// least one break each.
struct DensityPoint {
  long t = 0;
  std::size_t count = 0;
  double density = 0.0;  ///< count / total
  double kde = 0.0;
};
std::vector<DensityPoint> density_export(const StudyResult& result);

}  // namespace cenobreak
