#include "ccgm/model/checkpoint.hpp"

#include <cmath>

#include "ccgm/data/csv.hpp"
#include "ccgm/error.hpp"

namespace ccgm::model {

namespace {

constexpr int kFormatVersion = 1;

// JSON has no infinity; the scheduler's first-epoch sentinel is stored as null.
nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

nlohmann::json model_to_json(const CcgmModel& m) {
  nlohmann::json j;
  j["format"] = "ccgm-model";
  j["version"] = kFormatVersion;
  j["adjacency"] = scm::adjacency_to_json(m.adjacency, m.registry.names());
  nlohmann::json ranges = nlohmann::json::array();
  for (const auto& r : m.registry.ranges()) ranges.push_back({r.min, r.max});
  j["ranges"] = ranges;
  std::vector<std::string> roles;
  for (auto r : m.roles) roles.emplace_back(data::role_name(r));
  j["roles"] = roles;
  for (const auto* nets : {&m.encoders, &m.decoders}) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& net : *nets) arr.push_back(mlp_to_json(net));
    j[nets == &m.encoders ? "encoders" : "decoders"] = arr;
  }
  for (const auto* masks : {&m.masks.latent, &m.masks.label}) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& mask : *masks) arr.push_back(scm::mask_to_json(mask));
    j[masks == &m.masks.latent ? "latent_masks" : "label_masks"] = arr;
  }
  j["scheduler"] = {{"lambda", m.scheduler.lambda}, {"c", m.scheduler.c}, {"h_prev", finite_or_null(m.scheduler.h_prev)}};
  j["config"] = config_to_json(m.config);
  j["seed"] = m.config.seed;
  return j;
}

CcgmModel model_from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", "") != "ccgm-model") throw UsageError("not a model checkpoint");
    if (j.at("version").get<int>() != kFormatVersion) throw UsageError("unsupported checkpoint version");
    CcgmModel m;
    auto named = scm::adjacency_from_json(j.at("adjacency"));
    std::vector<scm::ConceptRange> ranges;
    for (const auto& r : j.at("ranges")) ranges.push_back({r.at(0).get<double>(), r.at(1).get<double>()});
    m.registry = scm::ConceptRegistry(named.concepts, named.adjacency.exogenous_flags(), ranges);
    m.adjacency = std::move(named.adjacency);
    for (const auto& r : j.at("roles")) m.roles.push_back(data::parse_role(r.get<std::string>()));
    for (const auto& e : j.at("encoders")) m.encoders.push_back(mlp_from_json(e));
    for (const auto& d : j.at("decoders")) m.decoders.push_back(mlp_from_json(d));
    for (const auto& g : j.at("latent_masks")) m.masks.latent.push_back(scm::mask_from_json(g));
    for (const auto& f : j.at("label_masks")) m.masks.label.push_back(scm::mask_from_json(f));
    const auto& s = j.at("scheduler");
    m.scheduler.lambda = s.at("lambda").get<double>();
    m.scheduler.c = s.at("c").get<double>();
    m.scheduler.h_prev = s.at("h_prev").is_null() ? std::numeric_limits<double>::infinity() : s.at("h_prev").get<double>();
    m.config = config_from_json(j.at("config"));

    const std::size_t n = m.registry.size();
    if (m.roles.size() != n || m.encoders.size() != n || m.decoders.size() != n || m.masks.latent.size() != n ||
        m.masks.label.size() != n) {
      throw UsageError("checkpoint: per-concept arrays do not match the " + std::to_string(n) + " concepts");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (m.encoders[i].inputs() != 1 || m.encoders[i].outputs() != 2 || m.decoders[i].inputs() != 1 ||
          m.decoders[i].outputs() != 1 || m.masks.latent[i].inputs() != n || m.masks.label[i].inputs() != n) {
        throw UsageError("checkpoint: network shapes of concept '" + m.registry.name(i) + "' are invalid");
      }
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("checkpoint: ") + e.what());
  }
}

void save_model(const CcgmModel& model, const std::filesystem::path& path) {
  data::write_text_file(path, model_to_json(model).dump() + "\n");
}

CcgmModel load_model(const std::filesystem::path& path) {
  const std::string text = data::read_text_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace ccgm::model
