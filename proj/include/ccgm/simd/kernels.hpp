#pragma once
// Dense double-precision kernels with a scalar reference implementation and
// ISA-specific variants (AVX2+FMA on x86-64, NEON on aarch64) picked at runtime.
//
// All variants are deterministic for a fixed ISA. Reductions in vector variants
// use a different summation order than the scalar reference, so results agree
// to rounding, not bit-for-bit.

#include <cstddef>
#include <span>
#include <string_view>

namespace ccgm::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa);

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum)(const double* a, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out = a * b (elementwise)
  void (*mul)(const double* a, const double* b, double* out, std::size_t n);
  // y += a * b (elementwise)
  void (*mul_add)(const double* a, const double* b, double* y, std::size_t n);
  // C[m x n] (+)= A[m x k] * B[k x n], all row-major and contiguous.
  void (*gemm_nn)(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                  double* c, bool accumulate);
  // C[m x n] (+)= A[m x k] * B[n x k]^T
  void (*gemm_nt)(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                  double* c, bool accumulate);
};

bool isa_supported(Isa isa);

// Best ISA available on this CPU. The environment variable CCGM_SIMD
// ("scalar", "avx2", "neon") overrides the choice when supported.
Isa detected_isa();

Isa active_isa();
// Throws ccgm::UsageError if the ISA is not supported on this machine/build.
void set_active_isa(Isa isa);

const KernelTable& kernels(Isa isa);
const KernelTable& active();

namespace detail {
extern const KernelTable kScalarKernels;
#if defined(CCGM_HAVE_AVX2)
extern const KernelTable kAvx2Kernels;
#endif
#if defined(CCGM_HAVE_NEON)
extern const KernelTable kNeonKernels;
#endif
}  // namespace detail

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}
inline double sum(std::span<const double> a) { return active().sum(a.data(), a.size()); }
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace ccgm::simd
