#include "ccgm/model/generate.hpp"

#include <cmath>
#include <random>

#include "ccgm/data/normalize.hpp"
#include "ccgm/error.hpp"

namespace ccgm::model {

std::vector<double> linspace(double a, double b, std::size_t k) {
  if (k == 0) throw UsageError("sweep needs at least one point");
  if (!std::isfinite(a) || !std::isfinite(b)) throw UsageError("sweep bounds must be finite");
  std::vector<double> v(k);
  for (std::size_t i = 0; i < k; ++i) v[i] = k == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(k - 1);
  return v;
}

Matrix generate_normalized(const CcgmModel& model, std::size_t count, std::uint64_t seed,
                           const scm::InterventionSpec& spec) {
  if (count == 0) throw UsageError("generate: row count must be positive");
  const auto resolved = scm::resolve(spec, model.registry);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t n = model.size();
  Matrix out(count, n);
  std::vector<double> z(n);
  for (std::size_t r = 0; r < count; ++r) {
    for (double& v : z) v = normal(rng);
    auto u = model.generate_from_latent(z, resolved);
    std::copy(u.begin(), u.end(), out.row_span(r).begin());
  }
  return out;
}

data::DataTable generate(const CcgmModel& model, std::size_t count, std::uint64_t seed,
                         const scm::InterventionSpec& spec) {
  auto t = data::denormalize_labels(generate_normalized(model, count, seed, spec), model.registry);
  for (std::size_t c = 0; c < t.cols(); ++c) t.set_role(c, model.roles.at(c));
  t.set_provenance("generated n=" + std::to_string(count) + ", seed " + std::to_string(seed));
  return t;
}

Matrix sweep_normalized(const CcgmModel& model, const Matrix& un, const SweepOptions& options) {
  const std::size_t target = model.registry.index_of(options.concept_name);
  if (options.values.empty()) throw UsageError("sweep needs at least one value");
  const std::size_t n = model.size();

  std::vector<double> base(n);
  if (options.base == SweepBase::Prior) {
    std::mt19937_64 rng(options.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double& v : base) v = normal(rng);
  } else {
    if (un.cols() != n) throw UsageError("sweep: dataset width does not match the model");
    if (options.row >= un.rows()) {
      throw UsageError("sweep: base row " + std::to_string(options.row) + " is outside the dataset (" +
                       std::to_string(un.rows()) + " rows)");
    }
    base = model.encode(un.row_span(options.row)).mean;
  }

  scm::ResolvedIntervention resolved = scm::resolve(options.spec, model.registry);
  for (const auto& [i, v] : resolved.clamps) {
    if (i == target) throw UsageError("sweep concept '" + options.concept_name + "' is also clamped");
  }
  resolved.clamps.emplace_back(target, 0.0);
  Matrix out(options.values.size(), n);
  for (std::size_t k = 0; k < options.values.size(); ++k) {
    if (!std::isfinite(options.values[k])) throw UsageError("sweep values must be finite");
    resolved.clamps.back().second = options.values[k];
    auto u = model.generate_from_latent(base, resolved);
    std::copy(u.begin(), u.end(), out.row_span(k).begin());
  }
  return out;
}

data::DataTable sweep(const CcgmModel& model, const Matrix& un, const SweepOptions& options) {
  const Matrix decoded = data::Normalizer(model.registry).inverse_matrix(sweep_normalized(model, un, options));
  std::vector<std::string> cols{"intervention"};
  for (const auto& name : model.registry.names()) cols.push_back(name);
  std::vector<data::ColumnRole> roles{data::ColumnRole::Other};
  roles.insert(roles.end(), model.roles.begin(), model.roles.end());
  data::DataTable t(cols, roles);
  std::vector<double> row(cols.size());
  for (std::size_t k = 0; k < decoded.rows(); ++k) {
    row[0] = options.values[k];
    for (std::size_t c = 0; c < decoded.cols(); ++c) row[c + 1] = decoded(k, c);
    t.add_row(row);
  }
  t.set_provenance("sweep of " + options.concept_name);
  return t;
}

}  // namespace ccgm::model
