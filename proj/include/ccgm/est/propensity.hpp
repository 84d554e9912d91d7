#pragma once

#include <span>
#include <vector>

#include "ccgm/est/effect_data.hpp"

namespace ccgm::est {

inline constexpr double kPropensityClip = 0.01;

// Logistic regression of treatment on confounders.
struct PropensityModel {
  std::vector<double> coefficients;  // intercept first
  double log_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;
  bool separated = false;  // fit ran off to infinity; predictions are still clipped

  double predict(std::span<const double> x) const;
  std::vector<double> predict_all(const Matrix& x) const;

  // pi(x) = p everywhere, for misspecification checks.
  static PropensityModel constant(double p, std::size_t confounders);
};

// Damped Newton; stops when the largest coefficient step is below 1e-8 or after
// 100 iterations.
PropensityModel fit_propensity(const EffectData& data);

}  // namespace ccgm::est
