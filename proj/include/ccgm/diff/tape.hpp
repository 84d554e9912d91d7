#pragma once
// Reverse-mode differentiation over a static graph of dense matrices.
//
// A Tape is built once (shapes are fixed at construction and validated then),
// then evaluated many times: bind() the named inputs, forward(), backward().
// Nodes are appended in construction order, which is a valid topological order
// because every op only accepts previously created nodes.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ccgm/diff/matrix.hpp"

namespace ccgm::diff {

struct Node {
  std::uint32_t index = 0;
  friend bool operator==(Node, Node) = default;
};

enum class Op : std::uint8_t {
  Input,
  Constant,
  Add,
  Subtract,
  Multiply,   // tensor * 1x1 scalar node
  MatVec,     // M v or M^T v, v is a column
  MatMul,     // op(A) op(B) with optional transposes
  Hadamard,
  Square,
  Nonlinear,  // elementwise tanh or exp
  Sum,
  Trace,
  Power,      // elementwise x^p for a constant p
};

enum class Nonlinearity : std::uint8_t { Tanh, Exp };

std::string_view op_name(Op op);

class Tape {
 public:
  Node input(std::string name, std::size_t rows, std::size_t cols);
  Node constant(Matrix value);
  Node scalar(double v) { return constant(Matrix::scalar(v)); }

  Node add(Node a, Node b);
  Node subtract(Node a, Node b);
  Node multiply(Node tensor, Node scalar);
  Node scale(Node tensor, double factor) { return multiply(tensor, scalar(factor)); }
  Node matvec(Node m, Node v, bool transpose = false);
  Node matmul(Node a, Node b, bool trans_a = false, bool trans_b = false);
  Node hadamard(Node a, Node b);
  Node square(Node a);
  Node nonlinear(Node a, Nonlinearity fn);
  Node tanh(Node a) { return nonlinear(a, Nonlinearity::Tanh); }
  Node exp(Node a) { return nonlinear(a, Nonlinearity::Exp); }
  Node sum(Node a);
  Node trace(Node a);
  Node power(Node a, double exponent);

  void bind(std::string_view name, const Matrix& value);
  void bind(Node input, const Matrix& value);
  std::optional<Node> find_input(std::string_view name) const;
  std::vector<std::string> input_names() const;

  // Evaluates every node up to and including `output`.
  const Matrix& forward(Node output);
  // Requires a scalar (1x1) output that has been evaluated by forward().
  void backward(Node output);

  const Matrix& value(Node n) const;
  const Matrix& adjoint(Node n) const;
  const Matrix& gradient(std::string_view input_name) const;

  std::size_t size() const noexcept { return nodes_.size(); }
  Op op(Node n) const { return nodes_.at(n.index).op; }
  std::string describe(Node n) const;

 private:
  struct Record {
    Op op = Op::Constant;
    Node a{};
    Node b{};
    double param = 0.0;
    bool trans_a = false;
    bool trans_b = false;
    Nonlinearity fn = Nonlinearity::Tanh;
    std::string name;
    bool bound = false;
    Matrix value;
    Matrix adjoint;
  };

  Node push(Record rec, std::size_t rows, std::size_t cols);
  const Record& at(Node n, std::string_view what) const;
  void evaluate(Record& rec);
  void propagate(const Record& rec);

  std::vector<Record> nodes_;
  std::map<std::string, std::uint32_t, std::less<>> inputs_;
  std::optional<std::uint32_t> evaluated_upto_;
  std::vector<double> scratch_;
};

}  // namespace ccgm::diff
