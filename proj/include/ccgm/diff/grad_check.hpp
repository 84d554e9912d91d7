#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "ccgm/diff/matrix.hpp"
#include "ccgm/diff/tape.hpp"

namespace ccgm::diff {

// Evaluates f at x, writing the analytic gradient into grad (same length as x).
using ValueAndGradient = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  // Set when the function, the analytic gradient or a finite difference is
  // non-finite; the check is then a failure regardless of max_rel_error.
  std::optional<std::size_t> nonfinite_index;

  bool ok(double tolerance) const { return !nonfinite_index && max_rel_error < tolerance; }
};

// max_i |analytic_i - central_i| / max(1, |central_i|), central differences with
// the given step.
GradCheckResult grad_check(const ValueAndGradient& fn, std::span<const double> point, double step);

// Convenience wrapper: checks d(output)/d(input) on a tape with all other inputs
// already bound. The input is restored to `at` afterwards.
GradCheckResult grad_check_input(Tape& tape, Node output, std::string_view input, const Matrix& at,
                                 double step);

}  // namespace ccgm::diff
