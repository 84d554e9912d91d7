#include "ccgm/model/training.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <random>

#include "ccgm/data/csv.hpp"
#include "ccgm/error.hpp"
#include "ccgm/model/losses.hpp"

namespace ccgm::model {

namespace {

// Independent streams for initialization, shuffling and reparameterization
// noise, all derived from the config seed.
std::mt19937_64 stream(std::uint64_t seed, std::uint32_t which) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), which};
  return std::mt19937_64(seq);
}

Matrix gather_rows(const Matrix& src, std::span<const std::size_t> idx) {
  Matrix out(idx.size(), src.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    auto from = src.row_span(idx[r]);
    std::copy(from.begin(), from.end(), out.row_span(r).begin());
  }
  return out;
}

void check_finite(double v, const char* phase, std::size_t epoch, const char* what) {
  if (!std::isfinite(v)) {
    throw NumericError(std::string(phase) + " diverged at epoch " + std::to_string(epoch) + ": " + what +
                       " is not finite");
  }
}

// While G is frozen the multipliers are held too; otherwise c would ratchet up
// against a constant H and hit its cap before G gets to move.
void end_of_epoch(CcgmModel& model, EpochMetrics& m, const char* phase, bool g_trained = true) {
  m.h = scm::dag_penalty(model.adjacency.g());
  check_finite(m.h, phase, m.epoch, "H(G)");
  if (g_trained) model.scheduler = scm::advance(model.scheduler, m.h, model.config.scheduler);
  m.lambda = model.scheduler.lambda;
  m.c = model.scheduler.c;
}

}  // namespace

void check_normalized(const Matrix& un) {
  if (un.rows() == 0) throw UsageError("training data is empty");
  for (std::size_t i = 0; i < un.size(); ++i) {
    if (!(un[i] >= -1.0 && un[i] <= 1.0)) {
      throw UsageError("normalized label at row " + std::to_string(i / un.cols() + 1) + " is outside [-1, 1]");
    }
  }
}

std::vector<EpochMetrics> pretrain(CcgmModel& model, const Matrix& un, const EpochCallback& on_epoch) {
  check_normalized(un);
  if (un.cols() != model.size()) throw UsageError("pretrain: label width does not match the model");
  const TrainConfig& cfg = model.config;
  auto rng = stream(cfg.seed, 1);
  std::vector<std::size_t> order(un.rows());
  std::iota(order.begin(), order.end(), 0);
  std::map<std::size_t, std::unique_ptr<PretrainGraph>> graphs;
  std::vector<EpochMetrics> log;

  for (std::size_t epoch = 0; epoch < cfg.pretrain_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    EpochMetrics m;
    m.epoch = epoch;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t b = std::min(cfg.batch_size, order.size() - start);
      auto& graph = graphs[b];
      if (!graph) graph = std::make_unique<PretrainGraph>(model, b);
      graph->bind(model.adjacency.g(), gather_rows(un, std::span(order).subspan(start, b)), model.scheduler.lambda,
                  model.scheduler.c);
      const double loss = graph->evaluate();
      check_finite(loss, "pretraining", epoch, "loss");
      m.loss_total += loss * static_cast<double>(b);
      m.loss_u += graph->label_loss() * static_cast<double>(b);
      Matrix g = model.adjacency.g();
      const Matrix& grad = graph->gradient();
      for (std::size_t k = 0; k < g.size(); ++k) g[k] -= cfg.pretrain_lr * grad[k];
      model.adjacency.set_g(g);
    }
    m.loss_total /= static_cast<double>(order.size());
    m.loss_u /= static_cast<double>(order.size());
    end_of_epoch(model, m, "pretraining");
    log.push_back(m);
    if (on_epoch) on_epoch("pretrain", m, model);
  }
  return log;
}

std::vector<EpochMetrics> train_main(CcgmModel& model, const Matrix& un, const EpochCallback& on_epoch) {
  check_normalized(un);
  if (un.cols() != model.size()) throw UsageError("train: label width does not match the model");
  const TrainConfig& cfg = model.config;
  auto shuffle_rng = stream(cfg.seed, 2);
  auto noise_rng = stream(cfg.seed, 3);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::size_t> order(un.rows());
  std::iota(order.begin(), order.end(), 0);
  std::map<std::size_t, std::unique_ptr<TrainGraph>> graphs;
  std::vector<EpochMetrics> log;

  for (std::size_t epoch = 0; epoch < cfg.main_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    EpochMetrics m;
    m.epoch = epoch;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t b = std::min(cfg.batch_size, order.size() - start);
      auto& graph = graphs[b];
      if (!graph) graph = std::make_unique<TrainGraph>(model, b);
      Matrix eps(b, model.size());
      for (double& e : eps.values()) e = normal(noise_rng);
      graph->bind_parameters(model);
      graph->bind_batch(gather_rows(un, std::span(order).subspan(start, b)), eps, model.scheduler.lambda,
                        model.scheduler.c);
      graph->evaluate();
      const auto& n = graph->losses();
      const double total = graph->value(n.total);
      check_finite(total, "training", epoch, "loss");
      const double w = static_cast<double>(b);
      m.loss_total += total * w;
      m.loss_elbo += graph->value(n.elbo) * w;
      m.loss_u += graph->value(n.label) * w;
      m.loss_z += graph->value(n.latent) * w;
      m.loss_kl += graph->value(n.kl_u) * w;
      try {
        graph->sgd_step(model, cfg.learning_rate, epoch >= cfg.g_warmup_epochs);
      } catch (const NumericError&) {
        throw NumericError("training diverged at epoch " + std::to_string(epoch) + ": parameters became non-finite");
      }
    }
    const double rows = static_cast<double>(order.size());
    for (double* v : {&m.loss_total, &m.loss_elbo, &m.loss_u, &m.loss_z, &m.loss_kl}) *v /= rows;
    end_of_epoch(model, m, "training", epoch >= cfg.g_warmup_epochs);
    log.push_back(m);
    if (on_epoch) on_epoch("train", m, model);
  }
  return log;
}

TrainResult train(const Matrix& un, const scm::ConceptRegistry& registry, const std::vector<data::ColumnRole>& roles,
                  const TrainConfig& config, const EpochCallback& on_epoch) {
  TrainResult r{CcgmModel::initialize(registry, roles, config), {}, {}, 0.0, false};
  r.pretrain_metrics = pretrain(r.model, un, on_epoch);
  r.metrics = train_main(r.model, un, on_epoch);
  r.final_h = scm::dag_penalty(r.model.adjacency.g());
  r.acyclic = r.final_h <= config.scheduler.tolerance;
  return r;
}

std::string format_metrics_csv(const std::vector<EpochMetrics>& metrics) {
  std::string out = "epoch,loss_total,loss_elbo,loss_u,loss_z,loss_kl,H,lambda,c\n";
  for (const auto& m : metrics) {
    out += std::to_string(m.epoch);
    for (double v : {m.loss_total, m.loss_elbo, m.loss_u, m.loss_z, m.loss_kl, m.h, m.lambda, m.c}) {
      out += ',';
      out += data::format_double(v);
    }
    out += '\n';
  }
  return out;
}

}  // namespace ccgm::model
