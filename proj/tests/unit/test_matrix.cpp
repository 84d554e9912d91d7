#include <doctest.h>

#include "ccgm/diff/linalg.hpp"
#include "ccgm/diff/matrix.hpp"
#include "ccgm/error.hpp"

using ccgm::diff::Matrix;

TEST_CASE("matrix construction and access") {
  Matrix m{{1, 2, 3}, {4, 5, 6}};
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 3);
  CHECK(m(1, 2) == 6);
  CHECK(m.transposed()(2, 1) == 6);
  CHECK(m.shape_string() == "2x3");
  CHECK(Matrix::identity(3)(1, 1) == 1.0);
  CHECK(Matrix::identity(3)(0, 1) == 0.0);
  CHECK_THROWS_AS(Matrix(2, 2, std::vector<double>{1, 2, 3}), ccgm::UsageError);
  CHECK_THROWS_AS((Matrix{{1, 2}, {3}}), ccgm::UsageError);
}

TEST_CASE("gemm handles every transpose combination") {
  Matrix a{{1, 2}, {3, 4}, {5, 6}};  // 3x2
  Matrix b{{7, 8, 9}, {10, 11, 12}};  // 2x3
  Matrix ab = ccgm::diff::matmul(a, b);
  CHECK(ab == Matrix{{27, 30, 33}, {61, 68, 75}, {95, 106, 117}});

  std::vector<double> scratch;
  Matrix c(3, 3);
  ccgm::diff::gemm(b, true, a, true, c, false, scratch);  // b^T a^T = (ab)^T
  CHECK(c == ab.transposed());
  Matrix d(2, 2);
  ccgm::diff::gemm(a, true, a, false, d, false, scratch);
  CHECK(d == Matrix{{35, 44}, {44, 56}});
  ccgm::diff::gemm(b, false, b, true, d, true, scratch);
  CHECK(d == Matrix{{35 + 194, 44 + 266}, {44 + 266, 56 + 365}});
}

TEST_CASE("dag power of a two-cycle") {
  Matrix g{{0, 1}, {1, 0}};
  CHECK(ccgm::diff::dag_power(g) == Matrix{{2, 2}, {2, 2}});
}
