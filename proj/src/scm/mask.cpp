#include "ccgm/scm/mask.hpp"

#include <cmath>

#include "ccgm/error.hpp"
#include "ccgm/scm/adjacency.hpp"
#include "ccgm/simd/kernels.hpp"

namespace ccgm::scm {

MaskNet MaskNet::summation(std::size_t inputs, std::size_t hidden, std::mt19937_64& rng, double init_scale) {
  if (inputs == 0 || hidden == 0) throw UsageError("mask net: inputs and hidden width must be positive");
  MaskNet m{Matrix(hidden, inputs), Matrix(1, hidden), Matrix(hidden, 1), Matrix(1, 1)};
  std::normal_distribution<double> normal(0.0, init_scale);
  for (double& w : m.w1.values()) w = normal(rng);
  return m;
}

double MaskNet::operator()(std::span<const double> v) const {
  if (v.size() != inputs()) {
    throw UsageError("mask net: got " + std::to_string(v.size()) + " inputs, expected " +
                     std::to_string(inputs()));
  }
  double out = simd::sum(v) + b2[0];
  for (std::size_t h = 0; h < hidden(); ++h) {
    const double pre = simd::dot(w1.row_span(h), v) + b1[h];
    out += w2[h] * std::tanh(pre);
  }
  return out;
}

MaskSet MaskSet::summation(std::size_t concepts, std::size_t hidden, std::mt19937_64& rng, double init_scale) {
  MaskSet s;
  for (std::size_t i = 0; i < concepts; ++i) s.latent.push_back(MaskNet::summation(concepts, hidden, rng, init_scale));
  for (std::size_t i = 0; i < concepts; ++i) s.label.push_back(MaskNet::summation(concepts, hidden, rng, init_scale));
  return s;
}

nlohmann::json mask_to_json(const MaskNet& m) {
  return {{"W1", matrix_to_json(m.w1)}, {"b1", matrix_to_json(m.b1)}, {"W2", matrix_to_json(m.w2)},
          {"b2", matrix_to_json(m.b2)}};
}

MaskNet mask_from_json(const nlohmann::json& j) {
  MaskNet m{matrix_from_json(j.at("W1")), matrix_from_json(j.at("b1")), matrix_from_json(j.at("W2")),
            matrix_from_json(j.at("b2"))};
  const std::size_t h = m.w1.rows();
  if (m.b1.rows() != 1 || m.b1.cols() != h || m.w2.rows() != h || m.w2.cols() != 1 || m.b2.size() != 1) {
    throw UsageError("mask net: inconsistent parameter shapes (W1 " + m.w1.shape_string() + ")");
  }
  return m;
}

MaskNodes add_mask_inputs(diff::Tape& tape, const std::string& prefix, const MaskNet& net) {
  MaskNodes n{tape.input(prefix + ".W1", net.w1.rows(), net.w1.cols()),
              tape.input(prefix + ".b1", 1, net.hidden()), tape.input(prefix + ".W2", net.hidden(), 1),
              tape.input(prefix + ".b2", 1, 1)};
  bind_mask(tape, prefix, net);
  return n;
}

void bind_mask(diff::Tape& tape, const std::string& prefix, const MaskNet& net) {
  tape.bind(prefix + ".W1", net.w1);
  tape.bind(prefix + ".b1", net.b1);
  tape.bind(prefix + ".W2", net.w2);
  tape.bind(prefix + ".b2", net.b2);
}

void read_mask_gradients(const diff::Tape& tape, const std::string& prefix, MaskNet& grad) {
  grad.w1 = tape.gradient(prefix + ".W1");
  grad.b1 = tape.gradient(prefix + ".b1");
  grad.w2 = tape.gradient(prefix + ".W2");
  grad.b2 = tape.gradient(prefix + ".b2");
}

diff::Node mask_forward(diff::Tape& tape, const MaskNodes& nodes, diff::Node v, diff::Node ones_b,
                        diff::Node ones_n) {
  diff::Node skip = tape.matmul(v, ones_n);
  diff::Node pre = tape.add(tape.matmul(v, nodes.w1, false, true), tape.matmul(ones_b, nodes.b1));
  diff::Node res = tape.matmul(tape.tanh(pre), nodes.w2);
  return tape.add(tape.add(skip, res), tape.matmul(ones_b, nodes.b2));
}

}  // namespace ccgm::scm
