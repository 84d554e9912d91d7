#include "ccgm/diff/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ccgm/error.hpp"

namespace ccgm::diff {

GradCheckResult grad_check(const ValueAndGradient& fn, std::span<const double> point, double step) {
  if (!(step > 0.0)) throw UsageError("grad_check step must be positive");
  GradCheckResult result;
  std::vector<double> x(point.begin(), point.end());
  std::vector<double> analytic(x.size());
  std::vector<double> scratch(x.size());

  const double f0 = fn(x, analytic);
  if (!std::isfinite(f0)) {
    result.nonfinite_index = 0;
    return result;
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(analytic[i])) {
      result.nonfinite_index = i;
      return result;
    }
    const double saved = x[i];
    x[i] = saved + step;
    const double fp = fn(x, scratch);
    x[i] = saved - step;
    const double fm = fn(x, scratch);
    x[i] = saved;
    const double central = (fp - fm) / (2.0 * step);
    if (!std::isfinite(central)) {
      result.nonfinite_index = i;
      return result;
    }
    const double err = std::abs(analytic[i] - central) / std::max(1.0, std::abs(central));
    if (err > result.max_rel_error) {
      result.max_rel_error = err;
      result.worst_index = i;
    }
  }
  return result;
}

GradCheckResult grad_check_input(Tape& tape, Node output, std::string_view input, const Matrix& at,
                                 double step) {
  const auto node = tape.find_input(input);
  if (!node) throw UsageError("grad_check: tape has no input '" + std::string(input) + "'");
  Matrix probe = at;
  auto fn = [&](std::span<const double> x, std::span<double> grad) {
    std::copy(x.begin(), x.end(), probe.values().begin());
    tape.bind(*node, probe);
    const double v = tape.forward(output)[0];
    tape.backward(output);
    const Matrix& g = tape.adjoint(*node);
    std::copy(g.values().begin(), g.values().end(), grad.begin());
    return v;
  };
  auto result = grad_check(fn, at.values(), step);
  tape.bind(*node, at);
  return result;
}

}  // namespace ccgm::diff
