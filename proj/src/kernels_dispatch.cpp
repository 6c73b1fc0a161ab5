#include <cstdlib>

#include "kernels_tables.hpp"

namespace cenobreak {

bool kernel_kind_from_string(const std::string& s, KernelKind& out) {
  if (s == "auto") { out = KernelKind::Auto; return true; }
  if (s == "scalar") { out = KernelKind::Scalar; return true; }
  if (s == "avx2") { out = KernelKind::Avx2; return true; }
  return false;
}

std::string to_string(KernelKind k) {
  switch (k) {
    case KernelKind::Auto: return "auto";
    case KernelKind::Scalar: return "scalar";
    case KernelKind::Avx2: return "avx2";
  }
  return "?";
}

namespace kernels {

bool avx2_supported() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

bool avx2_compiled() {
#if defined(CENOBREAK_HAVE_AVX2_TU)
  return true;
#else
  return false;
#endif
}

const KernelTable& get_kernels(KernelKind kind) {
  if (kind == KernelKind::Auto) {
    if (const char* env = std::getenv("CENOBREAK_KERNEL")) {
      KernelKind forced;
      if (kernel_kind_from_string(env, forced) && forced != KernelKind::Auto) {
        return get_kernels(forced);
      }
    }
    return get_kernels(avx2_supported() ? KernelKind::Avx2 : KernelKind::Scalar);
  }
#if defined(CENOBREAK_HAVE_AVX2_TU)
  if (kind == KernelKind::Avx2 && avx2_supported()) return kAvx2Kernels;
#endif
  return kScalarKernels;
}

}  // namespace kernels
}  // namespace cenobreak
