#include "ccgm/model/ccgm_model.hpp"

#include <cmath>

#include "ccgm/error.hpp"

namespace ccgm::model {

double bound_log_variance(double raw) { return kLogVarCenter + kLogVarHalfWidth * std::tanh(raw); }

CcgmModel CcgmModel::initialize(scm::ConceptRegistry registry, std::vector<data::ColumnRole> roles,
                                const TrainConfig& config) {
  config.validate();
  const std::size_t n = registry.size();
  if (n == 0) throw UsageError("model needs at least one concept");
  if (roles.empty()) roles.assign(n, data::ColumnRole::Concept);
  if (roles.size() != n) throw UsageError("model: one role per concept required");
  CcgmModel m;
  m.adjacency = scm::AdjacencySpec(registry.exogenous_flags());
  m.registry = std::move(registry);
  m.roles = std::move(roles);
  m.config = config;
  m.scheduler = {config.lambda0, config.c0, std::numeric_limits<double>::infinity()};

  std::mt19937_64 rng(config.seed);
  const std::size_t w = config.hidden_width;
  for (std::size_t i = 0; i < n; ++i) m.encoders.push_back(Mlp::init({1, w, w, 2}, rng));
  for (std::size_t i = 0; i < n; ++i) m.decoders.push_back(Mlp::init({1, w, w, 1}, rng));
  m.masks = scm::MaskSet::summation(n, config.mask_width, rng, config.mask_init_scale);
  return m;
}

Encoding CcgmModel::encode(std::span<const double> un) const {
  if (un.size() != size()) throw UsageError("encode: expected " + std::to_string(size()) + " labels");
  Encoding e{std::vector<double>(size()), std::vector<double>(size())};
  double out[2];
  for (std::size_t i = 0; i < size(); ++i) {
    encoders[i].forward(un.subspan(i, 1), out);
    e.mean[i] = out[0];
    e.log_variance[i] = bound_log_variance(out[1]);
  }
  return e;
}

std::vector<double> CcgmModel::decode(std::span<const double> z_hat) const {
  if (z_hat.size() != size()) throw UsageError("decode: expected " + std::to_string(size()) + " latents");
  std::vector<double> u(size());
  for (std::size_t i = 0; i < size(); ++i) decoders[i].forward(z_hat.subspan(i, 1), std::span(u).subspan(i, 1));
  return u;
}

std::vector<double> CcgmModel::generate_from_latent(std::span<const double> z,
                                                    const scm::ResolvedIntervention& spec) const {
  return decode(scm::apply_intervention(adjacency, masks.latent, z, spec));
}

std::vector<double> CcgmModel::reconstruct(std::span<const double> un, const scm::ResolvedIntervention& spec) const {
  return generate_from_latent(encode(un).mean, spec);
}

}  // namespace ccgm::model
