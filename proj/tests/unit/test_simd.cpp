#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ccgm/error.hpp"
#include "ccgm/simd/kernels.hpp"

using namespace ccgm::simd;

namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

std::vector<Isa> available() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon})
    if (isa_supported(isa)) out.push_back(isa);
  return out;
}

// Tolerance for reductions whose summation order differs from the reference.
double reduction_tol(const std::vector<double>& a, const std::vector<double>& b) {
  double mag = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) mag += std::abs(a[i] * b[i]);
  return 1e-14 * (1.0 + mag);
}

}  // namespace

TEST_CASE("scalar kernels are always available and dispatch honours the active isa") {
  CHECK(isa_supported(Isa::Scalar));
  const Isa before = active_isa();
  set_active_isa(Isa::Scalar);
  CHECK(active().isa == Isa::Scalar);
  set_active_isa(before);
  CHECK(active_isa() == before);
  CHECK(isa_name(Isa::Avx2) == "avx2");
}

TEST_CASE("unsupported isa is rejected") {
#if !defined(CCGM_HAVE_NEON)
  CHECK_THROWS_AS(set_active_isa(Isa::Neon), ccgm::UsageError);
#endif
}

TEST_CASE("vector kernels agree with the scalar reference") {
  const auto& ref = kernels(Isa::Scalar);
  for (Isa isa : available()) {
    const auto& k = kernels(isa);
    CAPTURE(isa_name(isa));
    for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 9u, 16u, 31u, 33u, 257u}) {
      CAPTURE(n);
      auto a = random_vector(n, 11 + n);
      auto b = random_vector(n, 97 + n);
      CHECK(std::abs(k.dot(a.data(), b.data(), n) - ref.dot(a.data(), b.data(), n)) <= reduction_tol(a, b));
      CHECK(std::abs(k.sum(a.data(), n) - ref.sum(a.data(), n)) <= 1e-13 * (1.0 + n));

      // Elementwise kernels have no reordering, FMA contraction aside.
      auto y1 = random_vector(n, 5), y2 = y1;
      k.axpy(0.75, a.data(), y1.data(), n);
      ref.axpy(0.75, a.data(), y2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-15));

      std::vector<double> o1(n), o2(n);
      k.mul(a.data(), b.data(), o1.data(), n);
      ref.mul(a.data(), b.data(), o2.data(), n);
      CHECK(o1 == o2);

      k.mul_add(a.data(), b.data(), o1.data(), n);
      ref.mul_add(a.data(), b.data(), o2.data(), n);
      for (std::size_t i = 0; i < n; ++i) CHECK(o1[i] == doctest::Approx(o2[i]).epsilon(1e-15));
    }
  }
}

TEST_CASE("gemm variants agree with the scalar reference for ragged shapes") {
  const auto& ref = kernels(Isa::Scalar);
  for (Isa isa : available()) {
    const auto& k = kernels(isa);
    for (std::size_t m : {1u, 3u, 8u, 13u})
      for (std::size_t n : {1u, 4u, 5u, 12u, 17u})
        for (std::size_t kk : {1u, 2u, 9u, 32u}) {
          CAPTURE(m);
          CAPTURE(n);
          CAPTURE(kk);
          auto a = random_vector(m * kk, 1 + m);
          auto b = random_vector(kk * n, 2 + n);
          for (bool acc : {false, true}) {
            auto c1 = random_vector(m * n, 3), c2 = c1;
            k.gemm_nn(m, n, kk, a.data(), b.data(), c1.data(), acc);
            ref.gemm_nn(m, n, kk, a.data(), b.data(), c2.data(), acc);
            for (std::size_t i = 0; i < m * n; ++i) CHECK(c1[i] == doctest::Approx(c2[i]).epsilon(1e-13));
            auto d1 = random_vector(m * n, 4), d2 = d1;
            k.gemm_nt(m, n, kk, a.data(), b.data(), d1.data(), acc);
            ref.gemm_nt(m, n, kk, a.data(), b.data(), d2.data(), acc);
            for (std::size_t i = 0; i < m * n; ++i) CHECK(d1[i] == doctest::Approx(d2[i]).epsilon(1e-13));
          }
        }
  }
}

TEST_CASE("gemm reference matches a naive triple loop") {
  const std::size_t m = 5, n = 6, k = 7;
  auto a = random_vector(m * k, 8);
  auto b = random_vector(k * n, 9);
  std::vector<double> c(m * n, 0.0);
  kernels(Isa::Scalar).gemm_nn(m, n, k, a.data(), b.data(), c.data(), false);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t p = 0; p < k; ++p) s += a[i * k + p] * b[p * n + j];
      CHECK(c[i * n + j] == doctest::Approx(s).epsilon(1e-14));
    }
}
