#include "ccgm/est/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ccgm/data/table.hpp"
#include "ccgm/error.hpp"

namespace ccgm::est {

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw UsageError("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw UsageError("quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

EffectReport bootstrap(const Estimator& estimator, const EffectData& data, std::size_t iterations,
                       std::uint64_t seed, std::string method) {
  if (iterations < 2) throw UsageError("bootstrap needs at least 2 resamples");
  const std::size_t n = data.size();
  if (n == 0) throw UsageError("bootstrap: no rows");
  constexpr int kMaxRedraws = 10;

  EffectReport r;
  r.method = std::move(method);
  r.iterations = iterations;
  r.seed = seed;
  r.estimate = estimator(data);
  r.samples.reserve(iterations);

  std::vector<std::size_t> rows(n);
  for (std::size_t it = 0; it < iterations; ++it) {
    std::mt19937_64 rng(seed + it);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    bool ok = false;
    std::string last_error = "non-finite estimate";
    for (int attempt = 0; attempt <= kMaxRedraws && !ok; ++attempt) {
      for (auto& v : rows) v = pick(rng);
      try {
        const double e = estimator(data.subset(rows));
        if (std::isfinite(e)) {
          r.samples.push_back(e);
          ok = true;
        }
      } catch (const Error& e) {
        last_error = e.what();
      }
    }
    if (!ok) {
      throw NumericError("bootstrap resample " + std::to_string(it) + " failed after " +
                         std::to_string(kMaxRedraws) + " redraws: " + last_error);
    }
  }
  r.mean = data::mean(r.samples);
  r.std = data::stddev(r.samples);
  r.q025 = quantile(r.samples, 0.025);
  r.q975 = quantile(r.samples, 0.975);
  return r;
}

}  // namespace ccgm::est
