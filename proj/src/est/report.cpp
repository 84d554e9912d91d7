#include "ccgm/est/report.hpp"

#include <algorithm>

#include "ccgm/data/csv.hpp"

namespace ccgm::est {

nlohmann::json report_to_json(const EffectReport& r) {
  return {{"method", r.method}, {"estimate", r.estimate}, {"mean", r.mean},           {"std", r.std},
          {"q025", r.q025},     {"q975", r.q975},         {"iterations", r.iterations}, {"seed", r.seed}};
}

std::string format_reports_csv(const std::vector<EffectReport>& reports) {
  using data::format_double;
  std::string out = "method,estimate,mean,std,q025,q975,iterations,seed\n";
  for (const auto& r : reports) {
    out += r.method + "," + format_double(r.estimate) + "," + format_double(r.mean) + "," + format_double(r.std) + "," +
           format_double(r.q025) + "," + format_double(r.q975) + "," + std::to_string(r.iterations) + "," +
           std::to_string(r.seed) + "\n";
  }
  return out;
}

std::string format_samples_csv(const std::vector<EffectReport>& reports) {
  std::string out = "iteration";
  std::size_t rows = 0;
  for (const auto& r : reports) {
    out += "," + r.method;
    rows = std::max(rows, r.samples.size());
  }
  out += "\n";
  for (std::size_t i = 0; i < rows; ++i) {
    out += std::to_string(i);
    for (const auto& r : reports) out += "," + (i < r.samples.size() ? data::format_double(r.samples[i]) : std::string());
    out += "\n";
  }
  return out;
}

}  // namespace ccgm::est
