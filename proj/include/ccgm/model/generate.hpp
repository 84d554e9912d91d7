#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ccgm/data/table.hpp"
#include "ccgm/model/ccgm_model.hpp"
#include "ccgm/scm/causal_layer.hpp"

namespace ccgm::model {

// k evenly spaced values from a to b inclusive (k = 1 gives a).
std::vector<double> linspace(double a, double b, std::size_t k);

// Prior draws z ~ N(0, I) pushed through the intervened causal layer and the
// decoder. Rows are normalized labels in registry order.
Matrix generate_normalized(const CcgmModel& model, std::size_t count, std::uint64_t seed,
                           const scm::InterventionSpec& spec = {});
// Same in physical units, with the model's column roles.
data::DataTable generate(const CcgmModel& model, std::size_t count, std::uint64_t seed,
                         const scm::InterventionSpec& spec = {});

enum class SweepBase { DatasetRow, Prior };

struct SweepOptions {
  std::string concept_name;
  std::vector<double> values;  // latent clamp values, normalized units
  scm::InterventionSpec spec;  // extra removals/clamps applied at every point
  SweepBase base = SweepBase::DatasetRow;
  std::size_t row = 0;         // dataset row encoded as the base sample
  std::uint64_t seed = 0;      // prior draw when base == Prior
};

// One decoded row per sweep value, normalized units. `un` is the normalized
// dataset the base row is taken from (unused for prior bases).
Matrix sweep_normalized(const CcgmModel& model, const Matrix& un, const SweepOptions& options);
// Physical units, with a leading "intervention" column holding the value.
data::DataTable sweep(const CcgmModel& model, const Matrix& un, const SweepOptions& options);

}  // namespace ccgm::model
