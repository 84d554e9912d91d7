#pragma once
// Gaussian copula simulator for correlation-matched tabular data.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ccgm/data/table.hpp"

namespace ccgm::data {

enum class MarginalKind { Normal, Uniform };

struct Marginal {
  MarginalKind kind = MarginalKind::Normal;
  double mean = 0.0;    // normal only
  double stddev = 1.0;  // normal only; uniform marginals live on [0, 1]
};

struct CopulaSpec {
  std::vector<std::string> names;
  std::vector<ColumnRole> roles;
  std::vector<bool> exogenous;
  // Target Pearson correlation of the output columns.
  Matrix correlation;
  std::vector<Marginal> marginals;
  std::uint64_t seed = 0;
  std::size_t rows = 0;
  // Whiten the Gaussian draw so its sample correlation equals the latent
  // target exactly; leaves only the marginal transform as a source of error.
  bool match_moments = true;
};

// SM, SE (confounders), D (uniform treatment score), Y (outcome) with the
// published mindset correlations.
CopulaSpec mindset_spec(std::size_t rows, std::uint64_t seed);

// Symmetric, unit diagonal, entries in [-1, 1]. Negative eigenvalues down to
// -tolerance are clipped (then the diagonal is rescaled back to one); anything
// more negative is rejected with UsageError.
Matrix repair_correlation(const Matrix& r, double tolerance = 1e-6);

// Latent normal correlation that yields `target` after the marginal
// transforms (exact for normal/uniform pairs).
Matrix latent_correlation(const Matrix& target, const std::vector<Marginal>& marginals);

DataTable simulate_copula(const CopulaSpec& spec);
inline DataTable simulate_mindset(const CopulaSpec& spec) { return simulate_copula(spec); }

// {"variables": [{"name", "role", "marginal": "normal"|"uniform", "mean", "std",
//   "exogenous"}], "correlation": [[...]]}
CopulaSpec copula_from_json(const nlohmann::json& j, std::size_t rows, std::uint64_t seed);

}  // namespace ccgm::data
