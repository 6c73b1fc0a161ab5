#pragma once
#include <cstddef>
#include <cstdint>
#include <string>

namespace cenobreak {

/// Which compute-kernel implementation the hot loops use.
/// Auto resolves to the widest instruction set the CPU supports, unless the
/// CENOBREAK_KERNEL environment variable ("scalar" or "avx2") overrides it.
enum class KernelKind { Auto, Scalar, Avx2 };

bool kernel_kind_from_string(const std::string& s, KernelKind& out);
std::string to_string(KernelKind k);

namespace kernels {

/// Minimum value and the smallest index attaining it.
struct MinLoc {
  double val;
  std::int64_t idx;
};

/// Prefix-moment views. Arrays have length n+1 with element 0 = 0, so the
/// moment of rows [a, b] is P[b+1] - P[a].
struct Q1View {
  const double* sy;   ///< prefix sums of the response
  const double* syy;  ///< prefix sums of squared response
};
struct Q2View {
  const double* sy;
  const double* syy;
  const double* sw;   ///< prefix sums of the regressor (lagged value)
  const double* sww;
  const double* swy;
};

/// Dynamic-programming relaxation for a per-regime constant (q = 1):
///   val(e) = prev[e + 1] + SSR(rows i..e of a mean fit)
/// minimized over e in [e_lo, e_hi]; ties resolve to the smallest e.
/// SSR uses the closed form syy - sy^2/n, clamped at 0.
using RelaxQ1Fn = MinLoc (*)(const double* prev, Q1View pf, std::int64_t i,
                             std::int64_t e_lo, std::int64_t e_hi);

/// Same relaxation for a per-regime intercept + slope design (q = 2).
/// A segment whose 2x2 moment matrix has condition > 1e12 (or non-positive
/// determinant) contributes +infinity.
using RelaxQ2Fn = MinLoc (*)(const double* prev, Q2View pf, std::int64_t i,
                             std::int64_t e_lo, std::int64_t e_hi);

/// Plain dot product (used by covariance accumulation).
using DotFn = double (*)(const double* a, const double* b, std::size_t n);

struct KernelTable {
  RelaxQ1Fn relax_q1;
  RelaxQ2Fn relax_q2;
  DotFn dot;
  const char* name;
};

/// Resolves a kernel table. Auto consults the CPU (and the CENOBREAK_KERNEL
/// environment variable); requesting Avx2 when unavailable falls back to
/// scalar.
const KernelTable& get_kernels(KernelKind kind);

/// True if this binary contains the AVX2 kernel translation unit.
bool avx2_compiled();
/// True if the running CPU supports AVX2.
bool avx2_supported();

}  // namespace kernels
}  // namespace cenobreak
