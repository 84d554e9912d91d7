#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ccgm/scm/adjacency.hpp"
#include "ccgm/scm/mask.hpp"

namespace ccgm::scm {

// z -> A^T z. Exogenous coordinates pass through; endogenous ones are rebuilt
// from their parents only.
std::vector<double> causal_forward_linear(const AdjacencySpec& a, std::span<const double> z);

// z_i -> g_i(A_i o z) for endogenous i, where A_i is column i of A (the parent
// weights of i). `masks` holds one net per concept.
std::vector<double> causal_forward_masked(const AdjacencySpec& a, std::span<const MaskNet> masks,
                                          std::span<const double> z);

struct InterventionSpec {
  std::vector<std::pair<std::string, std::string>> edge_removals;  // (parent, child)
  std::vector<std::pair<std::string, double>> clamps;              // normalized units

  bool empty() const noexcept { return edge_removals.empty() && clamps.empty(); }
};

struct ResolvedIntervention {
  std::vector<Edge> removals;
  std::vector<std::pair<std::size_t, double>> clamps;
};

// Maps names to indices and checks the spec invariants.
ResolvedIntervention resolve(const InterventionSpec& spec, const ConceptRegistry& registry);

AdjacencySpec apply_removals(const AdjacencySpec& a, std::span<const Edge> removals);

// Removes edges, clamps, then runs n masked passes re-clamping after each, so
// clamped values reach every descendant and never flow upstream.
std::vector<double> apply_intervention(const AdjacencySpec& a, std::span<const MaskNet> masks,
                                       std::span<const double> z, const ResolvedIntervention& spec);
std::vector<double> apply_intervention(const AdjacencySpec& a, std::span<const MaskNet> masks,
                                       std::span<const double> z, const InterventionSpec& spec,
                                       const ConceptRegistry& registry);

}  // namespace ccgm::scm
