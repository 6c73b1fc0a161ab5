#include "cenobreak/kernels_detail.hpp"
#include "kernels_tables.hpp"

namespace cenobreak::kernels {
namespace {

MinLoc relax_q1_scalar(const double* prev, Q1View pf, std::int64_t i,
                       std::int64_t e_lo, std::int64_t e_hi) {
  MinLoc best{std::numeric_limits<double>::infinity(), -1};
  for (std::int64_t e = e_lo; e <= e_hi; ++e) {
    const double val = prev[e + 1] + q1_cost(pf, i, e);
    if (val < best.val) best = {val, e};
  }
  return best;
}

MinLoc relax_q2_scalar(const double* prev, Q2View pf, std::int64_t i,
                       std::int64_t e_lo, std::int64_t e_hi) {
  MinLoc best{std::numeric_limits<double>::infinity(), -1};
  for (std::int64_t e = e_lo; e <= e_hi; ++e) {
    const double val = prev[e + 1] + q2_cost(pf, i, e);
    if (val < best.val) best = {val, e};
  }
  return best;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

const KernelTable kScalarKernels{relax_q1_scalar, relax_q2_scalar, dot_scalar, "scalar"};

}  // namespace cenobreak::kernels
