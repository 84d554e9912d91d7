#pragma once

#include <span>
#include <vector>

#include "ccgm/est/effect_data.hpp"

namespace ccgm::est {

// Per-arm least squares of Y on the confounders (intercept first). Treatment
// is constant inside an arm, so it only enters through the arm split.
struct OutcomeModel {
  std::vector<double> control;
  std::vector<double> treated;

  double predict(int arm, std::span<const double> x) const;
  static OutcomeModel zero(std::size_t confounders);
};

// UsageError when an arm has fewer than 2 + confounders rows.
OutcomeModel fit_outcome(const EffectData& data);

}  // namespace ccgm::est
