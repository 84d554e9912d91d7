#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ccgm/diff/tape.hpp"

namespace ccgm::model {

using diff::Matrix;
using diff::Node;

// Fully connected net with tanh hidden layers and a linear output layer.
// weights[l] is out x in, biases[l] is 1 x out.
struct Mlp {
  std::vector<Matrix> weights;
  std::vector<Matrix> biases;

  // Weights ~ N(0, 1 / fan_in), zero biases.
  static Mlp init(const std::vector<std::size_t>& sizes, std::mt19937_64& rng);

  std::size_t inputs() const { return weights.front().cols(); }
  std::size_t outputs() const { return weights.back().rows(); }
  std::size_t layers() const noexcept { return weights.size(); }

  void forward(std::span<const double> in, std::span<double> out) const;

  friend bool operator==(const Mlp&, const Mlp&) = default;
};

nlohmann::json mlp_to_json(const Mlp& m);
Mlp mlp_from_json(const nlohmann::json& j);

struct MlpNodes {
  std::vector<Node> weights;
  std::vector<Node> biases;
};

// Inputs "<prefix>.W<l>" and "<prefix>.b<l>", bound to `net`.
MlpNodes add_mlp_inputs(diff::Tape& tape, const std::string& prefix, const Mlp& net);
void bind_mlp(diff::Tape& tape, const std::string& prefix, const Mlp& net);
std::vector<std::string> mlp_input_names(const std::string& prefix, const Mlp& net);

// Rows of `x` (B x in) through the net; `ones_b` is B x 1.
Node mlp_forward(diff::Tape& tape, const MlpNodes& nodes, Node x, Node ones_b);

}  // namespace ccgm::model
