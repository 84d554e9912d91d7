#include "ccgm/scm/adjacency.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "ccgm/diff/linalg.hpp"
#include "ccgm/error.hpp"

namespace ccgm::scm {

ConceptRegistry::ConceptRegistry(std::vector<std::string> names, std::vector<bool> exogenous,
                                 std::vector<ConceptRange> ranges)
    : names_(std::move(names)), exogenous_(std::move(exogenous)), ranges_(std::move(ranges)) {
  if (exogenous_.size() != names_.size() || ranges_.size() != names_.size()) {
    throw UsageError("concept registry: " + std::to_string(names_.size()) + " names but " +
                     std::to_string(exogenous_.size()) + " role flags and " +
                     std::to_string(ranges_.size()) + " ranges");
  }
  std::set<std::string, std::less<>> seen;
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i].empty()) throw UsageError("concept registry: concept " + std::to_string(i) + " has an empty name");
    if (!seen.insert(names_[i]).second) throw UsageError("concept registry: duplicate concept '" + names_[i] + "'");
    const auto& r = ranges_[i];
    if (!std::isfinite(r.min) || !std::isfinite(r.max) || !(r.min < r.max)) {
      std::ostringstream os;
      os << "concept registry: range of '" << names_[i] << "' is [" << r.min << ", " << r.max
         << "], need finite min < max";
      throw UsageError(os.str());
    }
  }
}

bool ConceptRegistry::contains(std::string_view name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

std::size_t ConceptRegistry::index_of(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) {
    std::string known;
    for (const auto& n : names_) known += (known.empty() ? "" : ", ") + n;
    throw UsageError("unknown concept '" + std::string(name) + "' (known: " + known + ")");
  }
  return static_cast<std::size_t>(it - names_.begin());
}

AdjacencySpec::AdjacencySpec(std::vector<bool> exogenous)
    : g_(exogenous.size(), exogenous.size(), 0.0), exogenous_(std::move(exogenous)) {}

AdjacencySpec::AdjacencySpec(Matrix g, std::vector<bool> exogenous) : exogenous_(std::move(exogenous)) {
  validate(g);
  g_ = std::move(g);
}

bool AdjacencySpec::trainable(std::size_t parent, std::size_t child) const {
  return parent != child && !exogenous_.at(child);
}

Matrix AdjacencySpec::trainable_mask() const {
  const std::size_t n = size();
  Matrix m(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = trainable(i, j) ? 1.0 : 0.0;
  return m;
}

Matrix AdjacencySpec::b() const {
  const std::size_t n = size();
  Matrix m(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = exogenous_[i] ? 1.0 : 0.0;
  return m;
}

Matrix AdjacencySpec::a() const {
  Matrix m = g_;
  for (std::size_t i = 0; i < size(); ++i) m(i, i) += exogenous_[i] ? 1.0 : 0.0;
  return m;
}

void AdjacencySpec::set_weight(std::size_t parent, std::size_t child, double w) {
  if (parent >= size() || child >= size()) {
    throw UsageError("adjacency: edge (" + std::to_string(parent) + ", " + std::to_string(child) +
                     ") out of range for " + std::to_string(size()) + " concepts");
  }
  if (!std::isfinite(w)) throw NumericError("adjacency: non-finite weight");
  if (!trainable(parent, child) && w != 0.0) {
    throw UsageError("adjacency: entry (" + std::to_string(parent) + ", " + std::to_string(child) +
                     ") is structurally zero");
  }
  g_(parent, child) = w;
}

void AdjacencySpec::set_g(const Matrix& g) {
  validate(g);
  g_ = g;
}

void AdjacencySpec::validate(const Matrix& g) const {
  const std::size_t n = exogenous_.size();
  if (g.rows() != n || g.cols() != n) {
    throw UsageError("adjacency: G is " + g.shape_string() + " but there are " + std::to_string(n) +
                     " concepts");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double w = g(i, j);
      if (!std::isfinite(w)) {
        throw NumericError("adjacency: G(" + std::to_string(i) + ", " + std::to_string(j) + ") is not finite");
      }
      if (w != 0.0 && i == j) throw UsageError("adjacency: self-loop on concept " + std::to_string(i));
      if (w != 0.0 && exogenous_[j]) {
        throw UsageError("adjacency: G(" + std::to_string(i) + ", " + std::to_string(j) +
                         ") points into exogenous concept " + std::to_string(j));
      }
    }
  }
}

void check_compatible(const AdjacencySpec& adjacency, const ConceptRegistry& registry) {
  if (adjacency.size() != registry.size()) {
    throw UsageError("adjacency has " + std::to_string(adjacency.size()) + " concepts, registry has " +
                     std::to_string(registry.size()));
  }
  for (std::size_t i = 0; i < registry.size(); ++i) {
    if (adjacency.exogenous(i) != registry.exogenous(i)) {
      throw UsageError("concept '" + registry.name(i) + "' is " +
                       (registry.exogenous(i) ? "exogenous" : "endogenous") +
                       " in the registry but not in the adjacency");
    }
  }
}

double dag_penalty(const Matrix& g) {
  if (!g.is_square()) throw UsageError("dag penalty: G must be square, got " + g.shape_string());
  const Matrix p = diff::dag_power(g);
  double tr = 0.0;
  for (std::size_t i = 0; i < p.rows(); ++i) tr += p(i, i);
  return tr - static_cast<double>(g.rows());
}

diff::Node dag_penalty(diff::Tape& tape, diff::Node g) {
  const Matrix& gv = tape.value(g);
  if (!gv.is_square()) throw UsageError("dag penalty: G must be square, got " + gv.shape_string());
  const std::size_t n = gv.rows();
  diff::Node m = tape.add(tape.constant(Matrix::identity(n)), tape.square(g));
  diff::Node p = m;
  for (std::size_t k = 1; k < n; ++k) p = tape.matmul(p, m);
  return tape.subtract(tape.trace(p), tape.scalar(static_cast<double>(n)));
}

LagrangianUpdate lagrangian_step(double lambda, double c, double h, double h_prev,
                                 const SchedulerParams& params) {
  if (!std::isfinite(lambda) || !std::isfinite(c) || !std::isfinite(h) || std::isnan(h_prev)) {
    throw NumericError("lagrangian step: non-finite input (lambda=" + std::to_string(lambda) +
                       ", c=" + std::to_string(c) + ", H=" + std::to_string(h) + ")");
  }
  if (!(c > 0.0)) throw UsageError("lagrangian step: c must be positive, got " + std::to_string(c));
  LagrangianUpdate out{lambda + c * h, c};
  const bool stalled = std::abs(h) > params.gamma * std::abs(h_prev);
  if (stalled && std::abs(h) > params.tolerance) out.c = std::min(params.eta * c, std::max(c, params.c_max));
  return out;
}

SchedulerState advance(const SchedulerState& state, double h, const SchedulerParams& params) {
  const auto up = lagrangian_step(state.lambda, state.c, h, state.h_prev, params);
  return {up.lambda, up.c, h};
}

std::vector<Edge> threshold_adjacency(const AdjacencySpec& a, double tau) {
  if (std::isnan(tau) || tau < 0.0) throw UsageError("threshold must be non-negative");
  std::vector<Edge> edges;
  const Matrix& g = a.g();
  for (std::size_t i = 0; i < g.rows(); ++i)
    for (std::size_t j = 0; j < g.cols(); ++j)
      if (std::abs(g(i, j)) > tau) edges.push_back({i, j});
  return edges;
}

AdjacencySpec remove_edge(const AdjacencySpec& a, std::size_t parent, std::size_t child) {
  if (parent >= a.size() || child >= a.size()) {
    throw UsageError("remove edge: (" + std::to_string(parent) + ", " + std::to_string(child) +
                     ") out of range for " + std::to_string(a.size()) + " concepts");
  }
  if (parent == child) throw UsageError("remove edge: parent and child are the same concept");
  AdjacencySpec out = a;
  out.set_weight(parent, child, 0.0);
  return out;
}

AdjacencySpec remove_edge(const AdjacencySpec& a, const ConceptRegistry& registry, std::string_view parent,
                          std::string_view child) {
  return remove_edge(a, registry.index_of(parent), registry.index_of(child));
}

std::string format_edges(const std::vector<Edge>& edges, const ConceptRegistry& registry) {
  std::string out;
  for (const auto& e : edges) {
    if (!out.empty()) out += ", ";
    out += registry.name(e.parent) + "->" + registry.name(e.child);
  }
  return out;
}

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto s = m.row_span(r);
    rows.push_back(std::vector<double>(s.begin(), s.end()));
  }
  return rows;
}

Matrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw UsageError("matrix: expected an array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = rows == 0 ? 0 : j.at(0).size();
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& row = j.at(r);
    if (!row.is_array() || row.size() != cols) {
      throw UsageError("matrix: row " + std::to_string(r) + " has the wrong length (expected " +
                       std::to_string(cols) + ")");
    }
    for (std::size_t c = 0; c < cols; ++c) {
      if (!row.at(c).is_number()) {
        throw UsageError("matrix: entry (" + std::to_string(r) + ", " + std::to_string(c) + ") is not a number");
      }
      m(r, c) = row.at(c).get<double>();
    }
  }
  return m;
}

nlohmann::json adjacency_to_json(const AdjacencySpec& a, const std::vector<std::string>& concepts) {
  if (concepts.size() != a.size()) throw UsageError("adjacency json: concept count mismatch");
  nlohmann::json j;
  j["concepts"] = concepts;
  j["exogenous"] = std::vector<bool>(a.exogenous_flags());
  j["G"] = matrix_to_json(a.g());
  return j;
}

NamedAdjacency adjacency_from_json(const nlohmann::json& j) {
  try {
    NamedAdjacency out;
    out.concepts = j.at("concepts").get<std::vector<std::string>>();
    auto exo = j.at("exogenous").get<std::vector<bool>>();
    if (exo.size() != out.concepts.size()) throw UsageError("adjacency json: 'exogenous' length mismatch");
    Matrix g = matrix_from_json(j.at("G"));
    if (g.rows() == 0 && out.concepts.empty()) g = Matrix(0, 0);
    out.adjacency = AdjacencySpec(std::move(g), std::move(exo));
    return out;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("adjacency json: ") + e.what());
  }
}

}  // namespace ccgm::scm
