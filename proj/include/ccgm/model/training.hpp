#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ccgm/model/ccgm_model.hpp"

namespace ccgm::model {

struct EpochMetrics {
  std::size_t epoch = 0;
  double loss_total = 0.0;
  double loss_elbo = 0.0;  // reconstruction + KL to N(0, I)
  double loss_u = 0.0;
  double loss_z = 0.0;
  double loss_kl = 0.0;    // KL to the conditional prior N(u_n, I)
  double h = 0.0;          // H(G) at the end of the epoch
  double lambda = 0.0;     // after the end-of-epoch update
  double c = 0.0;
};

using EpochCallback = std::function<void(const char* phase, const EpochMetrics&, const CcgmModel&)>;

// Rows of `un` must lie in [-1, 1] (normalized labels, registry order).
void check_normalized(const Matrix& un);

// Linear-form fit of G with the augmented Lagrangian; masks are not touched.
std::vector<EpochMetrics> pretrain(CcgmModel& model, const Matrix& un, const EpochCallback& on_epoch = {});
// Joint SGD on every parameter. One metrics row per epoch.
std::vector<EpochMetrics> train_main(CcgmModel& model, const Matrix& un, const EpochCallback& on_epoch = {});

struct TrainResult {
  CcgmModel model;
  std::vector<EpochMetrics> pretrain_metrics;
  std::vector<EpochMetrics> metrics;
  double final_h = 0.0;
  bool acyclic = false;  // final H(G) <= dag tolerance
};

// initialize + pretrain + train_main. Deterministic for a fixed config.seed.
// Non-finite losses raise NumericError naming the phase and epoch.
TrainResult train(const Matrix& un, const scm::ConceptRegistry& registry, const std::vector<data::ColumnRole>& roles,
                  const TrainConfig& config, const EpochCallback& on_epoch = {});

std::string format_metrics_csv(const std::vector<EpochMetrics>& metrics);

}  // namespace ccgm::model
