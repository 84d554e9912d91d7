#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ccgm/est/bootstrap.hpp"

namespace ccgm::est {

nlohmann::json report_to_json(const EffectReport& r);
// Columns: method, estimate, mean, std, q025, q975, iterations, seed.
std::string format_reports_csv(const std::vector<EffectReport>& reports);
// One row per resample, one column per method.
std::string format_samples_csv(const std::vector<EffectReport>& reports);

}  // namespace ccgm::est
