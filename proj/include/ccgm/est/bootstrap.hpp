#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ccgm/est/effect_data.hpp"

namespace ccgm::est {

struct EffectReport {
  std::string method;
  double estimate = 0.0;  // on the full data
  double mean = 0.0;
  double std = 0.0;       // sample std over resamples
  double q025 = 0.0;
  double q975 = 0.0;
  std::size_t iterations = 0;
  std::uint64_t seed = 0;
  std::vector<double> samples;  // per-resample estimates, in iteration order
};

using Estimator = std::function<double(const EffectData&)>;

// Linear interpolation between order statistics; q in [0, 1].
double quantile(std::vector<double> values, double q);

// Resample i draws from mt19937_64(seed + i). A resample on which the
// estimator throws or returns a non-finite value is redrawn from the same
// stream, at most 10 times.
EffectReport bootstrap(const Estimator& estimator, const EffectData& data, std::size_t iterations,
                       std::uint64_t seed, std::string method = "custom");

}  // namespace ccgm::est
