#pragma once

#include <filesystem>

#include <json.hpp>

#include "ccgm/model/ccgm_model.hpp"

namespace ccgm::model {

// Everything needed to rebuild the model bit-exactly: registry, roles,
// adjacency, all network parameters, scheduler state and the config (which
// carries the seed).
nlohmann::json model_to_json(const CcgmModel& model);
CcgmModel model_from_json(const nlohmann::json& j);

void save_model(const CcgmModel& model, const std::filesystem::path& path);
// IoError if unreadable, UsageError if malformed.
CcgmModel load_model(const std::filesystem::path& path);

}  // namespace ccgm::model
