#pragma once

#include <cstddef>
#include <cstdint>

#include <json.hpp>

#include "ccgm/scm/adjacency.hpp"

namespace ccgm::model {

struct TrainConfig {
  std::size_t pretrain_epochs = 5;
  std::size_t main_epochs = 300;
  std::size_t batch_size = 64;
  double pretrain_lr = 0.1;
  double learning_rate = 1e-3;
  // Main-phase epochs during which G is held at its pre-trained value while
  // the encoders, decoders and masks adapt to it.
  std::size_t g_warmup_epochs = 20;

  double w_elbo = 1.0;
  double w_u = 1.0;
  double w_z = 1.0;
  double w_klu = 1.0;

  double lambda0 = 0.0;
  double c0 = 1.0;
  scm::SchedulerParams scheduler;

  // Std of the Gaussian decoder likelihood, in normalized label units.
  double recon_sigma = 0.1;
  std::size_t hidden_width = 32;
  std::size_t mask_width = 16;
  double mask_init_scale = 0.5;

  std::uint64_t seed = 0;

  // UsageError naming the offending field.
  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

nlohmann::json config_to_json(const TrainConfig& c);
TrainConfig config_from_json(const nlohmann::json& j);

}  // namespace ccgm::model
