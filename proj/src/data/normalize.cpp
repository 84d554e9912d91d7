#include "ccgm/data/normalize.hpp"

#include <algorithm>
#include <cmath>

#include "ccgm/error.hpp"

namespace ccgm::data {

Normalizer::Normalizer(std::vector<scm::ConceptRange> ranges) : ranges_(std::move(ranges)) {
  for (std::size_t i = 0; i < ranges_.size(); ++i) {
    if (!(ranges_[i].min < ranges_[i].max)) {
      throw UsageError("normalizer: range " + std::to_string(i) + " has min >= max");
    }
  }
}

double Normalizer::forward(std::size_t i, double u) const {
  const auto& r = ranges_.at(i);
  return 2.0 * (u - r.min) / (r.max - r.min) - 1.0;
}

double Normalizer::inverse(std::size_t i, double un) const {
  const auto& r = ranges_.at(i);
  return (un + 1.0) * 0.5 * (r.max - r.min) + r.min;
}

Matrix Normalizer::forward_matrix(const Matrix& u, std::size_t* clipped) const {
  if (u.cols() != size()) throw UsageError("normalizer: expected " + std::to_string(size()) + " columns");
  Matrix out(u.rows(), u.cols());
  std::size_t count = 0;
  for (std::size_t r = 0; r < u.rows(); ++r)
    for (std::size_t c = 0; c < u.cols(); ++c) {
      double v = forward(c, u(r, c));
      if (v < -1.0 || v > 1.0) {
        v = std::clamp(v, -1.0, 1.0);
        ++count;
      }
      out(r, c) = v;
    }
  if (clipped) *clipped = count;
  return out;
}

Matrix Normalizer::inverse_matrix(const Matrix& un) const {
  if (un.cols() != size()) throw UsageError("normalizer: expected " + std::to_string(size()) + " columns");
  Matrix out(un.rows(), un.cols());
  for (std::size_t r = 0; r < un.rows(); ++r)
    for (std::size_t c = 0; c < un.cols(); ++c) out(r, c) = inverse(c, un(r, c));
  return out;
}

NormalizedLabels normalize_labels(const DataTable& table, const scm::ConceptRegistry& registry) {
  std::vector<std::size_t> cols;
  for (const auto& name : registry.names()) cols.push_back(table.column_index(name));
  NormalizedLabels out;
  out.values = Normalizer(registry).forward_matrix(table.select(cols), &out.clipped);
  return out;
}

DataTable denormalize_labels(const Matrix& un, const scm::ConceptRegistry& registry) {
  return DataTable::from_matrix(Normalizer(registry).inverse_matrix(un), registry.names(),
                                std::vector<ColumnRole>(registry.size(), ColumnRole::Concept));
}

}  // namespace ccgm::data
