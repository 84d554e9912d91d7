#include "ccgm/diff/linalg.hpp"

#include "ccgm/simd/kernels.hpp"

namespace ccgm::diff {
namespace {

// Writes the transpose of m (rows x cols) into out (cols x rows).
void transpose_into(const Matrix& m, double* out) {
  const std::size_t r = m.rows();
  const std::size_t c = m.cols();
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) out[j * r + i] = m(i, j);
  }
}

}  // namespace

void gemm(const Matrix& a, bool trans_a, const Matrix& b, bool trans_b, Matrix& c, bool accumulate,
          std::vector<double>& scratch) {
  const auto& k = simd::active();
  const std::size_t m = trans_a ? a.cols() : a.rows();
  const std::size_t inner = trans_a ? a.rows() : a.cols();
  const std::size_t n = trans_b ? b.rows() : b.cols();

  const double* ap = a.data();
  if (trans_a) {
    scratch.resize(a.size());
    transpose_into(a, scratch.data());
    ap = scratch.data();
  }
  if (trans_b) {
    // A * B^T maps directly onto the dot-product kernel.
    k.gemm_nt(m, n, inner, ap, b.data(), c.data(), accumulate);
  } else {
    k.gemm_nn(m, n, inner, ap, b.data(), c.data(), accumulate);
  }
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  std::vector<double> scratch;
  gemm(a, false, b, false, c, false, scratch);
  return c;
}

Matrix dag_power(const Matrix& g) {
  const std::size_t n = g.rows();
  Matrix base = Matrix::identity(n);
  for (std::size_t i = 0; i < g.size(); ++i) base[i] += g[i] * g[i];
  Matrix acc = base;
  for (std::size_t p = 1; p < n; ++p) acc = matmul(acc, base);
  return acc;
}

}  // namespace ccgm::diff
