#pragma once
// Label-to-label causal generative model: per-concept encoders produce
// q(z_i | u_i), the causal layer maps z to z-hat, per-concept decoders map
// z-hat_i back to u_i.
//
// Encoders and decoders see a single concept each. A shared network would give
// the latents a path around the causal layer (an endogenous latent could carry
// information about its parents) and would let an intervened child move the
// decoded parents.

#include <span>
#include <vector>

#include "ccgm/data/table.hpp"
#include "ccgm/model/config.hpp"
#include "ccgm/model/mlp.hpp"
#include "ccgm/scm/adjacency.hpp"
#include "ccgm/scm/causal_layer.hpp"
#include "ccgm/scm/mask.hpp"

namespace ccgm::model {

// Smooth bound of the encoder log-variance to (-6, 2).
constexpr double kLogVarCenter = -2.0;
constexpr double kLogVarHalfWidth = 4.0;
double bound_log_variance(double raw);

struct Encoding {
  std::vector<double> mean;
  std::vector<double> log_variance;
};

struct CcgmModel {
  scm::ConceptRegistry registry;
  std::vector<data::ColumnRole> roles;
  scm::AdjacencySpec adjacency;
  std::vector<Mlp> encoders;  // 1 -> width -> width -> 2 (mean, raw log-variance)
  std::vector<Mlp> decoders;  // 1 -> width -> width -> 1
  scm::MaskSet masks;
  scm::SchedulerState scheduler;
  TrainConfig config;

  // Fresh model: zero G, summation masks, random encoder/decoder weights.
  static CcgmModel initialize(scm::ConceptRegistry registry, std::vector<data::ColumnRole> roles,
                              const TrainConfig& config);

  std::size_t size() const noexcept { return registry.size(); }

  Encoding encode(std::span<const double> un) const;
  std::vector<double> decode(std::span<const double> z_hat) const;
  // Encoder mean through the (optionally intervened) causal layer and decoder.
  std::vector<double> reconstruct(std::span<const double> un,
                                  const scm::ResolvedIntervention& spec = {}) const;
  // Latent z through the causal layer and decoder.
  std::vector<double> generate_from_latent(std::span<const double> z,
                                           const scm::ResolvedIntervention& spec = {}) const;

  friend bool operator==(const CcgmModel&, const CcgmModel&) = default;
};

}  // namespace ccgm::model
