#include <atomic>
#include <cstdlib>
#include <string>

#include "ccgm/error.hpp"
#include "ccgm/simd/kernels.hpp"

namespace ccgm::simd {
namespace {

bool cpu_has_avx2() {
#if defined(CCGM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa pick_isa() {
  if (const char* env = std::getenv("CCGM_SIMD")) {
    const std::string want(env);
    if (want == "scalar") return Isa::Scalar;
    if (want == "avx2" && isa_supported(Isa::Avx2)) return Isa::Avx2;
    if (want == "neon" && isa_supported(Isa::Neon)) return Isa::Neon;
  }
  if (isa_supported(Isa::Avx2)) return Isa::Avx2;
  if (isa_supported(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{&kernels(detected_isa())};
  return slot;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2: {
      static const bool has = cpu_has_avx2();
      return has;
    }
    case Isa::Neon:
#if defined(CCGM_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa detected_isa() {
  static const Isa isa = pick_isa();
  return isa;
}

const KernelTable& kernels(Isa isa) {
  if (!isa_supported(isa)) {
    throw UsageError("SIMD ISA '" + std::string(isa_name(isa)) + "' is not available");
  }
  switch (isa) {
#if defined(CCGM_HAVE_AVX2)
    case Isa::Avx2: return detail::kAvx2Kernels;
#endif
#if defined(CCGM_HAVE_NEON)
    case Isa::Neon: return detail::kNeonKernels;
#endif
    default: return detail::kScalarKernels;
  }
}

Isa active_isa() { return active_slot().load(std::memory_order_acquire)->isa; }

void set_active_isa(Isa isa) { active_slot().store(&kernels(isa), std::memory_order_release); }

const KernelTable& active() { return *active_slot().load(std::memory_order_acquire); }

}  // namespace ccgm::simd
