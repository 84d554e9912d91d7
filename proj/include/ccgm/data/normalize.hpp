#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ccgm/data/table.hpp"
#include "ccgm/scm/adjacency.hpp"

namespace ccgm::data {

// Per-column affine map u_n = 2 (u - min) / (max - min) - 1 onto [-1, 1].
class Normalizer {
 public:
  explicit Normalizer(std::vector<scm::ConceptRange> ranges);
  explicit Normalizer(const scm::ConceptRegistry& registry) : Normalizer(registry.ranges()) {}

  std::size_t size() const noexcept { return ranges_.size(); }
  double forward(std::size_t i, double u) const;
  double inverse(std::size_t i, double un) const;

  // Values outside [min, max] map outside [-1, 1]; forward_matrix clips them
  // and counts how many were clipped.
  Matrix forward_matrix(const Matrix& u, std::size_t* clipped = nullptr) const;
  Matrix inverse_matrix(const Matrix& un) const;

 private:
  std::vector<scm::ConceptRange> ranges_;
};

struct NormalizedLabels {
  Matrix values;  // rows x concepts, in registry order
  std::size_t clipped = 0;
};

// Columns are looked up by the registry's concept names.
NormalizedLabels normalize_labels(const DataTable& table, const scm::ConceptRegistry& registry);
DataTable denormalize_labels(const Matrix& un, const scm::ConceptRegistry& registry);

}  // namespace ccgm::data
