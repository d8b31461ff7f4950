#include "cayley/simd/kernels.hpp"

#include <initializer_list>

namespace cayley::simd {

#if !defined(CAYLEY_HAVE_AVX2)
const KernelTable* avx2_kernels() { return nullptr; }
#endif
#if !defined(CAYLEY_HAVE_NEON)
const KernelTable* neon_kernels() { return nullptr; }
#endif

const char* to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

bool cpu_supports(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if (defined(__GNUC__) || defined(__clang__)) && (defined(__x86_64__) || defined(__i386__))
      __builtin_cpu_init();
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable* kernels_for(Isa isa) {
  if (!cpu_supports(isa)) return nullptr;
  switch (isa) {
    case Isa::scalar: return &scalar_kernels();
    case Isa::avx2: return avx2_kernels();
    case Isa::neon: return neon_kernels();
  }
  return nullptr;
}

const KernelTable& active_kernels() {
  static const KernelTable& table = [] () -> const KernelTable& {
    for (Isa isa : {Isa::avx2, Isa::neon}) {
      if (const KernelTable* t = kernels_for(isa)) return *t;
    }
    return scalar_kernels();
  }();
  return table;
}

}  // namespace cayley::simd
