#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ccgm/data/table.hpp"

namespace ccgm::est {

using diff::Matrix;

// Binary treatment, outcome and confounders pulled out of a table.
struct EffectData {
  std::vector<double> d;  // 0 or 1
  std::vector<double> y;
  Matrix x;               // rows x confounders, may have zero columns

  std::size_t size() const noexcept { return y.size(); }
  std::size_t treated() const;
  // Rows picked by index, with repeats (bootstrap resamples).
  EffectData subset(std::span<const std::size_t> rows) const;
};

// Top round(fraction * N) scores become 1. Ties go to the lower row index.
std::vector<double> binarize_treatment(std::span<const double> scores, double treated_fraction = 0.30);

bool is_binary(std::span<const double> values);

struct ExtractOptions {
  double treated_fraction = 0.30;
  // Binarize even when the treatment column is already 0/1.
  bool force_binarize = false;
};

// Uses the table's treatment, outcome and confounder roles. A treatment column
// that is not already 0/1 is binarized.
EffectData extract_effect_data(const data::DataTable& table, const ExtractOptions& options = {});

}  // namespace ccgm::est
