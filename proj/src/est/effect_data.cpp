#include "ccgm/est/effect_data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ccgm/error.hpp"

namespace ccgm::est {

std::size_t EffectData::treated() const {
  return static_cast<std::size_t>(std::count(d.begin(), d.end(), 1.0));
}

EffectData EffectData::subset(std::span<const std::size_t> rows) const {
  EffectData out;
  out.d.reserve(rows.size());
  out.y.reserve(rows.size());
  out.x = Matrix(rows.size(), x.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const std::size_t r = rows[k];
    out.d.push_back(d.at(r));
    out.y.push_back(y[r]);
    for (std::size_t c = 0; c < x.cols(); ++c) out.x(k, c) = x(r, c);
  }
  return out;
}

std::vector<double> binarize_treatment(std::span<const double> scores, double treated_fraction) {
  if (scores.empty()) throw UsageError("binarize: no rows");
  if (!(treated_fraction >= 0.0 && treated_fraction <= 1.0)) throw UsageError("binarize: fraction must lie in [0, 1]");
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!std::isfinite(scores[i])) throw UsageError("binarize: score at row " + std::to_string(i + 1) + " is not finite");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  const auto k = static_cast<std::size_t>(std::llround(treated_fraction * static_cast<double>(scores.size())));
  std::vector<double> out(scores.size(), 0.0);
  for (std::size_t i = 0; i < k; ++i) out[order[i]] = 1.0;
  return out;
}

bool is_binary(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0 || v == 1.0; });
}

EffectData extract_effect_data(const data::DataTable& table, const ExtractOptions& options) {
  if (table.rows() == 0) throw UsageError("estimation needs at least one row");
  const std::size_t t = table.role_column(data::ColumnRole::Treatment);
  const std::size_t o = table.role_column(data::ColumnRole::Outcome);
  EffectData out;
  const auto scores = table.column(t);
  out.d = (!options.force_binarize && is_binary(scores)) ? scores : binarize_treatment(scores, options.treated_fraction);
  out.y = table.column(o);
  const auto conf = table.columns_with_role(data::ColumnRole::Confounder);
  out.x = table.select(conf);
  return out;
}

}  // namespace ccgm::est
