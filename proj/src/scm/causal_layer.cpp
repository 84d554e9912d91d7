#include "ccgm/scm/causal_layer.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "ccgm/error.hpp"

namespace ccgm::scm {

namespace {

void check_dim(const AdjacencySpec& a, std::span<const double> z) {
  if (z.size() != a.size()) {
    throw UsageError("causal layer: z has " + std::to_string(z.size()) + " entries, expected " +
                     std::to_string(a.size()));
  }
}

}  // namespace

std::vector<double> causal_forward_linear(const AdjacencySpec& a, std::span<const double> z) {
  check_dim(a, z);
  const std::size_t n = a.size();
  const Matrix& g = a.g();
  std::vector<double> out(n, 0.0);
  for (std::size_t child = 0; child < n; ++child) {
    if (a.exogenous(child)) {
      out[child] = z[child];
      continue;
    }
    double acc = 0.0;
    for (std::size_t parent = 0; parent < n; ++parent) acc += g(parent, child) * z[parent];
    out[child] = acc;
  }
  return out;
}

std::vector<double> causal_forward_masked(const AdjacencySpec& a, std::span<const MaskNet> masks,
                                          std::span<const double> z) {
  check_dim(a, z);
  const std::size_t n = a.size();
  if (masks.size() != n) {
    throw UsageError("causal layer: " + std::to_string(masks.size()) + " mask nets for " + std::to_string(n) +
                     " concepts");
  }
  const Matrix& g = a.g();
  std::vector<double> out(n, 0.0);
  std::vector<double> masked(n, 0.0);
  for (std::size_t child = 0; child < n; ++child) {
    if (a.exogenous(child)) {
      out[child] = z[child];
      continue;
    }
    for (std::size_t parent = 0; parent < n; ++parent) masked[parent] = g(parent, child) * z[parent];
    out[child] = masks[child](masked);
  }
  return out;
}

ResolvedIntervention resolve(const InterventionSpec& spec, const ConceptRegistry& registry) {
  ResolvedIntervention out;
  std::set<Edge> edges;
  for (const auto& [p, c] : spec.edge_removals) {
    Edge e{registry.index_of(p), registry.index_of(c)};
    if (e.parent == e.child) throw UsageError("edge removal " + p + ":" + c + " is a self-loop");
    if (!edges.insert(e).second) throw UsageError("edge " + p + ":" + c + " is removed twice");
    out.removals.push_back(e);
  }
  std::set<std::size_t> clamped;
  for (const auto& [name, value] : spec.clamps) {
    const std::size_t i = registry.index_of(name);
    if (!std::isfinite(value)) throw UsageError("clamp value for '" + name + "' is not finite");
    if (!clamped.insert(i).second) throw UsageError("concept '" + name + "' is clamped twice");
    out.clamps.emplace_back(i, value);
  }
  return out;
}

AdjacencySpec apply_removals(const AdjacencySpec& a, std::span<const Edge> removals) {
  AdjacencySpec out = a;
  for (const auto& e : removals) out = remove_edge(out, e.parent, e.child);
  return out;
}

std::vector<double> apply_intervention(const AdjacencySpec& a, std::span<const MaskNet> masks,
                                       std::span<const double> z, const ResolvedIntervention& spec) {
  check_dim(a, z);
  for (const auto& [i, v] : spec.clamps) {
    if (i >= a.size()) throw UsageError("clamp index " + std::to_string(i) + " out of range");
  }
  const AdjacencySpec work = spec.removals.empty() ? a : apply_removals(a, spec.removals);
  std::vector<double> cur(z.begin(), z.end());
  auto clamp = [&](std::vector<double>& v) {
    for (const auto& [i, value] : spec.clamps) v[i] = value;
  };
  clamp(cur);
  for (std::size_t pass = 0; pass < std::max<std::size_t>(work.size(), 1); ++pass) {
    cur = causal_forward_masked(work, masks, cur);
    clamp(cur);
  }
  return cur;
}

std::vector<double> apply_intervention(const AdjacencySpec& a, std::span<const MaskNet> masks,
                                       std::span<const double> z, const InterventionSpec& spec,
                                       const ConceptRegistry& registry) {
  check_compatible(a, registry);
  return apply_intervention(a, masks, z, resolve(spec, registry));
}

}  // namespace ccgm::scm
