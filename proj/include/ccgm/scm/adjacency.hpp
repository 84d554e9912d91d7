#pragma once
// Causal adjacency A = G + B: G is the trainable DAG part, B the fixed diagonal
// exogenous indicator. Convention: G(parent, child), so z = A^T z rebuilds each
// child from its parents.

#include <cstddef>
#include <filesystem>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ccgm/diff/matrix.hpp"
#include "ccgm/diff/tape.hpp"

namespace ccgm::scm {

using diff::Matrix;

struct ConceptRange {
  double min = -1.0;
  double max = 1.0;
  friend bool operator==(const ConceptRange&, const ConceptRange&) = default;
};

// Ordered named concepts with exogenous/endogenous roles and physical ranges
// used for [-1, 1] normalization.
class ConceptRegistry {
 public:
  ConceptRegistry() = default;
  ConceptRegistry(std::vector<std::string> names, std::vector<bool> exogenous,
                  std::vector<ConceptRange> ranges);

  std::size_t size() const noexcept { return names_.size(); }
  const std::string& name(std::size_t i) const { return names_.at(i); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  bool exogenous(std::size_t i) const { return exogenous_.at(i); }
  const std::vector<bool>& exogenous_flags() const noexcept { return exogenous_; }
  const ConceptRange& range(std::size_t i) const { return ranges_.at(i); }
  const std::vector<ConceptRange>& ranges() const noexcept { return ranges_; }

  bool contains(std::string_view name) const;
  // Throws UsageError naming the concept when absent.
  std::size_t index_of(std::string_view name) const;

  friend bool operator==(const ConceptRegistry&, const ConceptRegistry&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<bool> exogenous_;
  std::vector<ConceptRange> ranges_;
};

struct Edge {
  std::size_t parent = 0;
  std::size_t child = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

class AdjacencySpec {
 public:
  AdjacencySpec() = default;
  // All-zero G.
  explicit AdjacencySpec(std::vector<bool> exogenous);
  // Rejects a G with self-loops or with weights into exogenous concepts.
  AdjacencySpec(Matrix g, std::vector<bool> exogenous);

  std::size_t size() const noexcept { return exogenous_.size(); }
  const Matrix& g() const noexcept { return g_; }
  bool exogenous(std::size_t i) const { return exogenous_.at(i); }
  const std::vector<bool>& exogenous_flags() const noexcept { return exogenous_; }

  // Entry (parent, child) is trainable iff parent != child and child is endogenous.
  bool trainable(std::size_t parent, std::size_t child) const;
  Matrix trainable_mask() const;
  Matrix b() const;
  Matrix a() const;

  double weight(std::size_t parent, std::size_t child) const { return g_(parent, child); }
  void set_weight(std::size_t parent, std::size_t child, double w);
  void set_g(const Matrix& g);

  friend bool operator==(const AdjacencySpec&, const AdjacencySpec&) = default;

 private:
  void validate(const Matrix& g) const;

  Matrix g_;
  std::vector<bool> exogenous_;
};

// Throws UsageError when registry roles disagree with diag(B).
void check_compatible(const AdjacencySpec& adjacency, const ConceptRegistry& registry);

// H(G) = tr[(I + G o G)^n] - n; zero iff G is acyclic.
double dag_penalty(const Matrix& g);
// Same quantity recorded on a tape; `g` must be a square node.
diff::Node dag_penalty(diff::Tape& tape, diff::Node g);

struct SchedulerParams {
  double eta = 2.0;
  double gamma = 0.9;
  // c is held once |H| is at or below this level.
  double tolerance = 1e-8;
  double c_max = 1e4;
  friend bool operator==(const SchedulerParams&, const SchedulerParams&) = default;
};

struct SchedulerState {
  double lambda = 0.0;
  double c = 1.0;
  // Penalty of the previous epoch; +inf before the first update so c never
  // escalates on epoch one.
  double h_prev = std::numeric_limits<double>::infinity();
  friend bool operator==(const SchedulerState&, const SchedulerState&) = default;
};

struct LagrangianUpdate {
  double lambda = 0.0;
  double c = 1.0;
};

// lambda' = lambda + c H;  c' = eta c if |H| > gamma |H_prev| (and |H| above
// tolerance, capped at c_max), else c.
LagrangianUpdate lagrangian_step(double lambda, double c, double h, double h_prev,
                                 const SchedulerParams& params = {});

// Applies lagrangian_step at an epoch boundary and records h as the new h_prev.
SchedulerState advance(const SchedulerState& state, double h, const SchedulerParams& params = {});

// {(i, j) : |G(i, j)| > tau}, in row-major order.
std::vector<Edge> threshold_adjacency(const AdjacencySpec& a, double tau);

// Copy with G(parent, child) = 0. No retraining is implied.
AdjacencySpec remove_edge(const AdjacencySpec& a, std::size_t parent, std::size_t child);
AdjacencySpec remove_edge(const AdjacencySpec& a, const ConceptRegistry& registry,
                          std::string_view parent, std::string_view child);

std::string format_edges(const std::vector<Edge>& edges, const ConceptRegistry& registry);

// {"concepts": [...], "exogenous": [...], "G": [[row], ...]}
nlohmann::json adjacency_to_json(const AdjacencySpec& a, const std::vector<std::string>& concepts);
struct NamedAdjacency {
  std::vector<std::string> concepts;
  AdjacencySpec adjacency;
};
NamedAdjacency adjacency_from_json(const nlohmann::json& j);

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);

}  // namespace ccgm::scm
