#include "ccgm/model/mlp.hpp"

#include <cmath>

#include "ccgm/error.hpp"
#include "ccgm/scm/adjacency.hpp"
#include "ccgm/simd/kernels.hpp"

namespace ccgm::model {

Mlp Mlp::init(const std::vector<std::size_t>& sizes, std::mt19937_64& rng) {
  if (sizes.size() < 2) throw UsageError("mlp needs at least an input and an output size");
  Mlp m;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    if (sizes[l] == 0 || sizes[l + 1] == 0) throw UsageError("mlp layer sizes must be positive");
    std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(sizes[l])));
    Matrix w(sizes[l + 1], sizes[l]);
    for (double& v : w.values()) v = normal(rng);
    m.weights.push_back(std::move(w));
    m.biases.emplace_back(1, sizes[l + 1], 0.0);
  }
  return m;
}

void Mlp::forward(std::span<const double> in, std::span<double> out) const {
  if (in.size() != inputs() || out.size() != outputs()) throw UsageError("mlp: input/output size mismatch");
  std::vector<double> cur(in.begin(), in.end()), next;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    const Matrix& w = weights[l];
    next.assign(w.rows(), 0.0);
    for (std::size_t r = 0; r < w.rows(); ++r) {
      const double pre = simd::dot(w.row_span(r), cur) + biases[l][r];
      next[r] = l + 1 < weights.size() ? std::tanh(pre) : pre;
    }
    cur.swap(next);
  }
  std::copy(cur.begin(), cur.end(), out.begin());
}

nlohmann::json mlp_to_json(const Mlp& m) {
  nlohmann::json layers = nlohmann::json::array();
  for (std::size_t l = 0; l < m.layers(); ++l) {
    layers.push_back({{"W", scm::matrix_to_json(m.weights[l])}, {"b", scm::matrix_to_json(m.biases[l])}});
  }
  return layers;
}

Mlp mlp_from_json(const nlohmann::json& j) {
  Mlp m;
  for (const auto& layer : j) {
    m.weights.push_back(scm::matrix_from_json(layer.at("W")));
    m.biases.push_back(scm::matrix_from_json(layer.at("b")));
  }
  if (m.weights.empty()) throw UsageError("mlp: no layers");
  for (std::size_t l = 0; l < m.layers(); ++l) {
    if (m.biases[l].rows() != 1 || m.biases[l].cols() != m.weights[l].rows() ||
        (l > 0 && m.weights[l].cols() != m.weights[l - 1].rows())) {
      throw UsageError("mlp: inconsistent shapes at layer " + std::to_string(l));
    }
  }
  return m;
}

std::vector<std::string> mlp_input_names(const std::string& prefix, const Mlp& net) {
  std::vector<std::string> names;
  for (std::size_t l = 0; l < net.layers(); ++l) {
    names.push_back(prefix + ".W" + std::to_string(l));
    names.push_back(prefix + ".b" + std::to_string(l));
  }
  return names;
}

MlpNodes add_mlp_inputs(diff::Tape& tape, const std::string& prefix, const Mlp& net) {
  MlpNodes n;
  for (std::size_t l = 0; l < net.layers(); ++l) {
    n.weights.push_back(tape.input(prefix + ".W" + std::to_string(l), net.weights[l].rows(), net.weights[l].cols()));
    n.biases.push_back(tape.input(prefix + ".b" + std::to_string(l), 1, net.biases[l].cols()));
  }
  bind_mlp(tape, prefix, net);
  return n;
}

void bind_mlp(diff::Tape& tape, const std::string& prefix, const Mlp& net) {
  for (std::size_t l = 0; l < net.layers(); ++l) {
    tape.bind(prefix + ".W" + std::to_string(l), net.weights[l]);
    tape.bind(prefix + ".b" + std::to_string(l), net.biases[l]);
  }
}

Node mlp_forward(diff::Tape& tape, const MlpNodes& nodes, Node x, Node ones_b) {
  Node cur = x;
  for (std::size_t l = 0; l < nodes.weights.size(); ++l) {
    Node pre = tape.add(tape.matmul(cur, nodes.weights[l], false, true), tape.matmul(ones_b, nodes.biases[l]));
    cur = l + 1 < nodes.weights.size() ? tape.tanh(pre) : pre;
  }
  return cur;
}

}  // namespace ccgm::model
