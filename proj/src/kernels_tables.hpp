#pragma once
#include "cenobreak/kernels.hpp"

// Internal: concrete kernel tables linked by the dispatcher.
namespace cenobreak::kernels {
extern const KernelTable kScalarKernels;
#if defined(CENOBREAK_HAVE_AVX2_TU)
extern const KernelTable kAvx2Kernels;
#endif
}  // namespace cenobreak::kernels
