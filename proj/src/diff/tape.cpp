#include "ccgm/diff/tape.hpp"

#include <cmath>

#include "ccgm/diff/linalg.hpp"
#include "ccgm/error.hpp"
#include "ccgm/simd/kernels.hpp"

namespace ccgm::diff {
namespace {

[[noreturn]] void shape_error(std::size_t index, Op op, const std::string& detail) {
  throw UsageError("node " + std::to_string(index) + " (" + std::string(op_name(op)) +
                   "): " + detail);
}

}  // namespace

std::string_view op_name(Op op) {
  switch (op) {
    case Op::Input: return "input";
    case Op::Constant: return "constant";
    case Op::Add: return "add";
    case Op::Subtract: return "subtract";
    case Op::Multiply: return "multiply";
    case Op::MatVec: return "matvec";
    case Op::MatMul: return "matmul";
    case Op::Hadamard: return "hadamard";
    case Op::Square: return "square";
    case Op::Nonlinear: return "nonlinear";
    case Op::Sum: return "sum";
    case Op::Trace: return "trace";
    case Op::Power: return "power";
  }
  return "?";
}

const Tape::Record& Tape::at(Node n, std::string_view what) const {
  if (n.index >= nodes_.size()) {
    throw UsageError(std::string(what) + ": node " + std::to_string(n.index) +
                     " does not exist on this tape");
  }
  return nodes_[n.index];
}

Node Tape::push(Record rec, std::size_t rows, std::size_t cols) {
  rec.value = Matrix(rows, cols);
  rec.adjoint = Matrix(rows, cols);
  nodes_.push_back(std::move(rec));
  evaluated_upto_.reset();
  return Node{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

Node Tape::input(std::string name, std::size_t rows, std::size_t cols) {
  if (inputs_.contains(name)) throw UsageError("duplicate tape input '" + name + "'");
  Record rec;
  rec.op = Op::Input;
  rec.name = name;
  const Node n = push(std::move(rec), rows, cols);
  inputs_.emplace(std::move(name), n.index);
  return n;
}

Node Tape::constant(Matrix value) {
  Record rec;
  rec.op = Op::Constant;
  const std::size_t r = value.rows();
  const std::size_t c = value.cols();
  const Node n = push(std::move(rec), r, c);
  nodes_[n.index].value = std::move(value);
  nodes_[n.index].bound = true;
  return n;
}

Node Tape::add(Node a, Node b) {
  const auto& ra = at(a, "add");
  const auto& rb = at(b, "add");
  if (!ra.value.same_shape(rb.value)) {
    shape_error(nodes_.size(), Op::Add,
                ra.value.shape_string() + " vs " + rb.value.shape_string());
  }
  Record rec;
  rec.op = Op::Add;
  rec.a = a;
  rec.b = b;
  return push(std::move(rec), ra.value.rows(), ra.value.cols());
}

Node Tape::subtract(Node a, Node b) {
  const auto& ra = at(a, "subtract");
  const auto& rb = at(b, "subtract");
  if (!ra.value.same_shape(rb.value)) {
    shape_error(nodes_.size(), Op::Subtract,
                ra.value.shape_string() + " vs " + rb.value.shape_string());
  }
  Record rec;
  rec.op = Op::Subtract;
  rec.a = a;
  rec.b = b;
  return push(std::move(rec), ra.value.rows(), ra.value.cols());
}

Node Tape::multiply(Node tensor, Node scalar) {
  const auto& rt = at(tensor, "multiply");
  const auto& rs = at(scalar, "multiply");
  if (rs.value.rows() != 1 || rs.value.cols() != 1) {
    shape_error(nodes_.size(), Op::Multiply,
                "scalar operand must be 1x1, got " + rs.value.shape_string());
  }
  Record rec;
  rec.op = Op::Multiply;
  rec.a = tensor;
  rec.b = scalar;
  return push(std::move(rec), rt.value.rows(), rt.value.cols());
}

Node Tape::matvec(Node m, Node v, bool transpose) {
  const auto& rm = at(m, "matvec");
  const auto& rv = at(v, "matvec");
  const std::size_t inner = transpose ? rm.value.rows() : rm.value.cols();
  const std::size_t outer = transpose ? rm.value.cols() : rm.value.rows();
  if (rv.value.cols() != 1 || rv.value.rows() != inner) {
    shape_error(nodes_.size(), Op::MatVec,
                std::string(transpose ? "transposed " : "") + rm.value.shape_string() +
                    " matrix against " + rv.value.shape_string() + " vector");
  }
  Record rec;
  rec.op = Op::MatVec;
  rec.a = m;
  rec.b = v;
  rec.trans_a = transpose;
  return push(std::move(rec), outer, 1);
}

Node Tape::matmul(Node a, Node b, bool trans_a, bool trans_b) {
  const auto& ra = at(a, "matmul");
  const auto& rb = at(b, "matmul");
  const std::size_t m = trans_a ? ra.value.cols() : ra.value.rows();
  const std::size_t ka = trans_a ? ra.value.rows() : ra.value.cols();
  const std::size_t kb = trans_b ? rb.value.cols() : rb.value.rows();
  const std::size_t n = trans_b ? rb.value.rows() : rb.value.cols();
  if (ka != kb) {
    shape_error(nodes_.size(), Op::MatMul,
                "inner dimensions differ: " + ra.value.shape_string() + (trans_a ? "^T" : "") +
                    " * " + rb.value.shape_string() + (trans_b ? "^T" : ""));
  }
  Record rec;
  rec.op = Op::MatMul;
  rec.a = a;
  rec.b = b;
  rec.trans_a = trans_a;
  rec.trans_b = trans_b;
  return push(std::move(rec), m, n);
}

Node Tape::hadamard(Node a, Node b) {
  const auto& ra = at(a, "hadamard");
  const auto& rb = at(b, "hadamard");
  if (!ra.value.same_shape(rb.value)) {
    shape_error(nodes_.size(), Op::Hadamard,
                ra.value.shape_string() + " vs " + rb.value.shape_string());
  }
  Record rec;
  rec.op = Op::Hadamard;
  rec.a = a;
  rec.b = b;
  return push(std::move(rec), ra.value.rows(), ra.value.cols());
}

Node Tape::square(Node a) {
  const auto& ra = at(a, "square");
  Record rec;
  rec.op = Op::Square;
  rec.a = a;
  return push(std::move(rec), ra.value.rows(), ra.value.cols());
}

Node Tape::nonlinear(Node a, Nonlinearity fn) {
  const auto& ra = at(a, "nonlinear");
  Record rec;
  rec.op = Op::Nonlinear;
  rec.a = a;
  rec.fn = fn;
  return push(std::move(rec), ra.value.rows(), ra.value.cols());
}

Node Tape::sum(Node a) {
  at(a, "sum");
  Record rec;
  rec.op = Op::Sum;
  rec.a = a;
  return push(std::move(rec), 1, 1);
}

Node Tape::trace(Node a) {
  const auto& ra = at(a, "trace");
  if (!ra.value.is_square()) {
    shape_error(nodes_.size(), Op::Trace, "needs a square matrix, got " + ra.value.shape_string());
  }
  Record rec;
  rec.op = Op::Trace;
  rec.a = a;
  return push(std::move(rec), 1, 1);
}

Node Tape::power(Node a, double exponent) {
  const auto& ra = at(a, "power");
  Record rec;
  rec.op = Op::Power;
  rec.a = a;
  rec.param = exponent;
  return push(std::move(rec), ra.value.rows(), ra.value.cols());
}

void Tape::bind(std::string_view name, const Matrix& value) {
  const auto it = inputs_.find(name);
  if (it == inputs_.end()) throw UsageError("tape has no input named '" + std::string(name) + "'");
  bind(Node{it->second}, value);
}

void Tape::bind(Node input, const Matrix& value) {
  auto& rec = nodes_.at(input.index);
  if (rec.op != Op::Input) throw UsageError(describe(input) + " is not an input");
  if (!rec.value.same_shape(value)) {
    throw UsageError("input '" + rec.name + "' (node " + std::to_string(input.index) +
                     ") expects " + rec.value.shape_string() + ", got " + value.shape_string());
  }
  std::copy(value.values().begin(), value.values().end(), rec.value.values().begin());
  rec.bound = true;
  evaluated_upto_.reset();
}

std::optional<Node> Tape::find_input(std::string_view name) const {
  const auto it = inputs_.find(name);
  if (it == inputs_.end()) return std::nullopt;
  return Node{it->second};
}

std::vector<std::string> Tape::input_names() const {
  std::vector<std::string> names;
  for (const auto& [name, idx] : inputs_) names.push_back(name);
  return names;
}

std::string Tape::describe(Node n) const {
  if (n.index >= nodes_.size()) return "node " + std::to_string(n.index) + " (missing)";
  const auto& rec = nodes_[n.index];
  std::string s = "node " + std::to_string(n.index) + " (" + std::string(op_name(rec.op));
  if (!rec.name.empty()) s += " '" + rec.name + "'";
  return s + ", " + rec.value.shape_string() + ")";
}

void Tape::evaluate(Record& rec) {
  const auto& k = simd::active();
  Matrix& out = rec.value;
  const std::size_t len = out.size();
  switch (rec.op) {
    case Op::Input:
    case Op::Constant:
      return;
    case Op::Add: {
      const Matrix& a = nodes_[rec.a.index].value;
      const Matrix& b = nodes_[rec.b.index].value;
      for (std::size_t i = 0; i < len; ++i) out[i] = a[i] + b[i];
      return;
    }
    case Op::Subtract: {
      const Matrix& a = nodes_[rec.a.index].value;
      const Matrix& b = nodes_[rec.b.index].value;
      for (std::size_t i = 0; i < len; ++i) out[i] = a[i] - b[i];
      return;
    }
    case Op::Multiply: {
      const Matrix& a = nodes_[rec.a.index].value;
      const double s = nodes_[rec.b.index].value[0];
      for (std::size_t i = 0; i < len; ++i) out[i] = s * a[i];
      return;
    }
    case Op::MatVec:
      gemm(nodes_[rec.a.index].value, rec.trans_a, nodes_[rec.b.index].value, false, out, false,
           scratch_);
      return;
    case Op::MatMul:
      gemm(nodes_[rec.a.index].value, rec.trans_a, nodes_[rec.b.index].value, rec.trans_b, out,
           false, scratch_);
      return;
    case Op::Hadamard:
      k.mul(nodes_[rec.a.index].value.data(), nodes_[rec.b.index].value.data(), out.data(), len);
      return;
    case Op::Square: {
      const Matrix& a = nodes_[rec.a.index].value;
      k.mul(a.data(), a.data(), out.data(), len);
      return;
    }
    case Op::Nonlinear: {
      const Matrix& a = nodes_[rec.a.index].value;
      if (rec.fn == Nonlinearity::Tanh) {
        for (std::size_t i = 0; i < len; ++i) out[i] = std::tanh(a[i]);
      } else {
        for (std::size_t i = 0; i < len; ++i) out[i] = std::exp(a[i]);
      }
      return;
    }
    case Op::Sum: {
      const Matrix& a = nodes_[rec.a.index].value;
      out[0] = k.sum(a.data(), a.size());
      return;
    }
    case Op::Trace: {
      const Matrix& a = nodes_[rec.a.index].value;
      double t = 0.0;
      for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
      out[0] = t;
      return;
    }
    case Op::Power: {
      const Matrix& a = nodes_[rec.a.index].value;
      for (std::size_t i = 0; i < len; ++i) out[i] = std::pow(a[i], rec.param);
      return;
    }
  }
}

const Matrix& Tape::forward(Node output) {
  at(output, "forward");
  for (std::uint32_t i = 0; i <= output.index; ++i) {
    auto& rec = nodes_[i];
    if (rec.op == Op::Input && !rec.bound) {
      throw UsageError("input '" + rec.name + "' (node " + std::to_string(i) + ") is not bound");
    }
    evaluate(rec);
  }
  if (!evaluated_upto_ || *evaluated_upto_ < output.index) evaluated_upto_ = output.index;
  return nodes_[output.index].value;
}

void Tape::propagate(const Record& rec) {
  const auto& k = simd::active();
  const Matrix& g = rec.adjoint;
  const std::size_t len = g.size();
  switch (rec.op) {
    case Op::Input:
    case Op::Constant:
      return;
    case Op::Add: {
      Matrix& ga = nodes_[rec.a.index].adjoint;
      Matrix& gb = nodes_[rec.b.index].adjoint;
      k.axpy(1.0, g.data(), ga.data(), len);
      k.axpy(1.0, g.data(), gb.data(), len);
      return;
    }
    case Op::Subtract: {
      Matrix& ga = nodes_[rec.a.index].adjoint;
      Matrix& gb = nodes_[rec.b.index].adjoint;
      k.axpy(1.0, g.data(), ga.data(), len);
      k.axpy(-1.0, g.data(), gb.data(), len);
      return;
    }
    case Op::Multiply: {
      const Matrix& a = nodes_[rec.a.index].value;
      const double s = nodes_[rec.b.index].value[0];
      k.axpy(s, g.data(), nodes_[rec.a.index].adjoint.data(), len);
      nodes_[rec.b.index].adjoint[0] += k.dot(g.data(), a.data(), len);
      return;
    }
    case Op::MatVec: {
      const Matrix& m = nodes_[rec.a.index].value;
      const Matrix& v = nodes_[rec.b.index].value;
      Matrix& gm = nodes_[rec.a.index].adjoint;
      Matrix& gv = nodes_[rec.b.index].adjoint;
      if (!rec.trans_a) {
        gemm(g, false, v, true, gm, true, scratch_);   // g v^T
        gemm(m, true, g, false, gv, true, scratch_);   // M^T g
      } else {
        gemm(v, false, g, true, gm, true, scratch_);   // v g^T
        gemm(m, false, g, false, gv, true, scratch_);  // M g
      }
      return;
    }
    case Op::MatMul: {
      const Matrix& a = nodes_[rec.a.index].value;
      const Matrix& b = nodes_[rec.b.index].value;
      Matrix& ga = nodes_[rec.a.index].adjoint;
      Matrix& gb = nodes_[rec.b.index].adjoint;
      if (!rec.trans_a && !rec.trans_b) {
        gemm(g, false, b, true, ga, true, scratch_);
        gemm(a, true, g, false, gb, true, scratch_);
      } else if (!rec.trans_a && rec.trans_b) {
        gemm(g, false, b, false, ga, true, scratch_);
        gemm(g, true, a, false, gb, true, scratch_);
      } else if (rec.trans_a && !rec.trans_b) {
        gemm(b, false, g, true, ga, true, scratch_);
        gemm(a, false, g, false, gb, true, scratch_);
      } else {
        gemm(b, true, g, true, ga, true, scratch_);
        gemm(g, true, a, true, gb, true, scratch_);
      }
      return;
    }
    case Op::Hadamard: {
      const Matrix& a = nodes_[rec.a.index].value;
      const Matrix& b = nodes_[rec.b.index].value;
      k.mul_add(g.data(), b.data(), nodes_[rec.a.index].adjoint.data(), len);
      k.mul_add(g.data(), a.data(), nodes_[rec.b.index].adjoint.data(), len);
      return;
    }
    case Op::Square: {
      const Matrix& a = nodes_[rec.a.index].value;
      Matrix& ga = nodes_[rec.a.index].adjoint;
      for (std::size_t i = 0; i < len; ++i) ga[i] += 2.0 * a[i] * g[i];
      return;
    }
    case Op::Nonlinear: {
      const Matrix& y = rec.value;
      Matrix& ga = nodes_[rec.a.index].adjoint;
      if (rec.fn == Nonlinearity::Tanh) {
        for (std::size_t i = 0; i < len; ++i) ga[i] += g[i] * (1.0 - y[i] * y[i]);
      } else {
        k.mul_add(g.data(), y.data(), ga.data(), len);
      }
      return;
    }
    case Op::Sum: {
      Matrix& ga = nodes_[rec.a.index].adjoint;
      const double s = g[0];
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += s;
      return;
    }
    case Op::Trace: {
      Matrix& ga = nodes_[rec.a.index].adjoint;
      for (std::size_t i = 0; i < ga.rows(); ++i) ga(i, i) += g[0];
      return;
    }
    case Op::Power: {
      const Matrix& a = nodes_[rec.a.index].value;
      Matrix& ga = nodes_[rec.a.index].adjoint;
      const double p = rec.param;
      for (std::size_t i = 0; i < len; ++i) ga[i] += g[i] * p * std::pow(a[i], p - 1.0);
      return;
    }
  }
}

void Tape::backward(Node output) {
  const auto& out = at(output, "backward");
  if (out.value.rows() != 1 || out.value.cols() != 1) {
    throw UsageError("backward needs a scalar output, " + describe(output) + " is not");
  }
  if (!evaluated_upto_ || *evaluated_upto_ < output.index) {
    throw UsageError("backward called before forward evaluated " + describe(output));
  }
  for (auto& rec : nodes_) rec.adjoint.fill(0.0);
  nodes_[output.index].adjoint[0] = 1.0;
  for (std::uint32_t i = output.index + 1; i-- > 0;) propagate(nodes_[i]);
}

const Matrix& Tape::value(Node n) const { return at(n, "value").value; }

const Matrix& Tape::adjoint(Node n) const { return at(n, "adjoint").adjoint; }

const Matrix& Tape::gradient(std::string_view input_name) const {
  const auto it = inputs_.find(input_name);
  if (it == inputs_.end()) {
    throw UsageError("tape has no input named '" + std::string(input_name) + "'");
  }
  return nodes_[it->second].adjoint;
}

}  // namespace ccgm::diff
