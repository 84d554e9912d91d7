#include "ccgm/model/config.hpp"

#include <cmath>
#include <string>

#include "ccgm/error.hpp"

namespace ccgm::model {

namespace {

void require(bool ok, const char* field, const std::string& why) {
  if (!ok) throw UsageError(std::string("config: ") + field + " " + why);
}

}  // namespace

void TrainConfig::validate() const {
  require(batch_size > 0, "batch_size", "must be positive");
  require(std::isfinite(pretrain_lr) && pretrain_lr > 0, "pretrain_lr", "must be positive");
  require(std::isfinite(learning_rate) && learning_rate > 0, "learning_rate", "must be positive");
  for (auto [v, name] : {std::pair{w_elbo, "w_elbo"}, {w_u, "w_u"}, {w_z, "w_z"}, {w_klu, "w_klu"}}) {
    require(std::isfinite(v) && v >= 0, name, "must be a non-negative weight");
  }
  require(std::isfinite(lambda0), "lambda0", "must be finite");
  require(std::isfinite(c0) && c0 > 0, "c0", "must be positive");
  require(std::isfinite(recon_sigma) && recon_sigma > 0, "recon_sigma", "must be positive");
  require(hidden_width > 0, "hidden_width", "must be positive");
  require(mask_width > 0, "mask_width", "must be positive");
  require(std::isfinite(mask_init_scale) && mask_init_scale >= 0, "mask_init_scale", "must be non-negative");
  require(scheduler.eta >= 1 && std::isfinite(scheduler.eta), "eta", "must be >= 1");
  require(scheduler.gamma > 0 && std::isfinite(scheduler.gamma), "gamma", "must be positive");
  require(scheduler.c_max >= c0, "c_max", "must be >= c0");
  require(scheduler.tolerance >= 0, "dag_tolerance", "must be non-negative");
}

nlohmann::json config_to_json(const TrainConfig& c) {
  return {{"pretrain_epochs", c.pretrain_epochs},
          {"main_epochs", c.main_epochs},
          {"batch_size", c.batch_size},
          {"pretrain_lr", c.pretrain_lr},
          {"learning_rate", c.learning_rate},
          {"g_warmup_epochs", c.g_warmup_epochs},
          {"w_elbo", c.w_elbo},
          {"w_u", c.w_u},
          {"w_z", c.w_z},
          {"w_klu", c.w_klu},
          {"lambda0", c.lambda0},
          {"c0", c.c0},
          {"eta", c.scheduler.eta},
          {"gamma", c.scheduler.gamma},
          {"dag_tolerance", c.scheduler.tolerance},
          {"c_max", c.scheduler.c_max},
          {"recon_sigma", c.recon_sigma},
          {"hidden_width", c.hidden_width},
          {"mask_width", c.mask_width},
          {"mask_init_scale", c.mask_init_scale},
          {"seed", c.seed}};
}

TrainConfig config_from_json(const nlohmann::json& j) {
  try {
    TrainConfig c;
    c.pretrain_epochs = j.at("pretrain_epochs").get<std::size_t>();
    c.main_epochs = j.at("main_epochs").get<std::size_t>();
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.pretrain_lr = j.at("pretrain_lr").get<double>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.g_warmup_epochs = j.at("g_warmup_epochs").get<std::size_t>();
    c.w_elbo = j.at("w_elbo").get<double>();
    c.w_u = j.at("w_u").get<double>();
    c.w_z = j.at("w_z").get<double>();
    c.w_klu = j.at("w_klu").get<double>();
    c.lambda0 = j.at("lambda0").get<double>();
    c.c0 = j.at("c0").get<double>();
    c.scheduler.eta = j.at("eta").get<double>();
    c.scheduler.gamma = j.at("gamma").get<double>();
    c.scheduler.tolerance = j.at("dag_tolerance").get<double>();
    c.scheduler.c_max = j.at("c_max").get<double>();
    c.recon_sigma = j.at("recon_sigma").get<double>();
    c.hidden_width = j.at("hidden_width").get<std::size_t>();
    c.mask_width = j.at("mask_width").get<std::size_t>();
    c.mask_init_scale = j.at("mask_init_scale").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.validate();
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config json: ") + e.what());
  }
}

}  // namespace ccgm::model
