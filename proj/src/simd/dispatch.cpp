#include <cstdio>
#include <cstdlib>
#include <string>

#include "pks/simd/kernels.hpp"

namespace pks::simd {

#ifdef PKS_HAVE_AVX2
const KernelTable& avx2_kernel_table();
#endif

bool cpu_has_avx2_fma() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* avx2_kernels() {
#ifdef PKS_HAVE_AVX2
  if (cpu_has_avx2_fma()) return &avx2_kernel_table();
#endif
  return nullptr;
}

namespace {

const KernelTable& select() {
  const char* env = std::getenv("PKS_SIMD");
  std::string want = env ? env : "auto";
  if (want == "scalar") return scalar_kernels();
  const KernelTable* fast = avx2_kernels();
  if (want == "avx2" && !fast) {
    std::fprintf(stderr, "pks: PKS_SIMD=avx2 requested but unavailable, using scalar kernels\n");
  } else if (want != "avx2" && want != "auto") {
    std::fprintf(stderr, "pks: unknown PKS_SIMD value '%s', using auto\n", want.c_str());
  }
  return fast ? *fast : scalar_kernels();
}

}  // namespace

const KernelTable& active_kernels() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace pks::simd
