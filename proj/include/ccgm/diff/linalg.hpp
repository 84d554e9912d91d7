#pragma once

#include <vector>

#include "ccgm/diff/matrix.hpp"

namespace ccgm::diff {

// c (+)= op(a) * op(b) where op transposes when the flag is set. Shapes are the
// caller's responsibility (the tape validates them at graph construction).
// `scratch` is reused for transposed copies to avoid per-call allocation.
void gemm(const Matrix& a, bool trans_a, const Matrix& b, bool trans_b, Matrix& c, bool accumulate,
          std::vector<double>& scratch);

Matrix matmul(const Matrix& a, const Matrix& b);

// (I + G o G)^n with n = rows(G), via repeated multiplication.
Matrix dag_power(const Matrix& g);

}  // namespace ccgm::diff
