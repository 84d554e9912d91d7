#pragma once
// Mask networks g_i(v): a summation skip plus a small tanh residual,
//   g(v) = sum(v) + w2^T tanh(W1 v + b1) + b2.
// With w2 = b2 = 0 the masked forward equals the linear SCM exactly, so
// training starts from the linear model and learns departures from it.

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ccgm/diff/matrix.hpp"
#include "ccgm/diff/tape.hpp"

namespace ccgm::scm {

using diff::Matrix;

struct MaskNet {
  Matrix w1;  // hidden x n
  Matrix b1;  // 1 x hidden
  Matrix w2;  // hidden x 1
  Matrix b2;  // 1 x 1

  static MaskNet summation(std::size_t inputs, std::size_t hidden, std::mt19937_64& rng,
                           double init_scale = 0.5);

  std::size_t inputs() const noexcept { return w1.cols(); }
  std::size_t hidden() const noexcept { return w1.rows(); }
  double operator()(std::span<const double> v) const;

  friend bool operator==(const MaskNet&, const MaskNet&) = default;
};

// One net per concept; nets of exogenous concepts exist but are never used.
struct MaskSet {
  std::vector<MaskNet> latent;  // g, acting on z
  std::vector<MaskNet> label;   // f, acting on u

  static MaskSet summation(std::size_t concepts, std::size_t hidden, std::mt19937_64& rng,
                           double init_scale = 0.5);
  friend bool operator==(const MaskSet&, const MaskSet&) = default;
};

nlohmann::json mask_to_json(const MaskNet& m);
MaskNet mask_from_json(const nlohmann::json& j);

struct MaskNodes {
  diff::Node w1, b1, w2, b2;
};

// Creates inputs "<prefix>.W1", ".b1", ".W2", ".b2" and binds them to `net`.
MaskNodes add_mask_inputs(diff::Tape& tape, const std::string& prefix, const MaskNet& net);
void bind_mask(diff::Tape& tape, const std::string& prefix, const MaskNet& net);
void read_mask_gradients(const diff::Tape& tape, const std::string& prefix, MaskNet& grad);

// Batched g over rows of `v` (B x n); `ones_b` is B x 1, `ones_n` is n x 1.
// Returns B x 1.
diff::Node mask_forward(diff::Tape& tape, const MaskNodes& nodes, diff::Node v, diff::Node ones_b,
                        diff::Node ones_n);

}  // namespace ccgm::scm
