#include "ccgm/model/losses.hpp"

#include <cmath>
#include <functional>

#include "ccgm/error.hpp"
#include "ccgm/simd/kernels.hpp"

namespace ccgm::model {

namespace {

std::string enc_name(std::size_t i) { return "enc." + std::to_string(i); }
std::string dec_name(std::size_t i) { return "dec." + std::to_string(i); }
std::string gmask_name(std::size_t i) { return "gmask." + std::to_string(i); }
std::string fmask_name(std::size_t i) { return "fmask." + std::to_string(i); }

Node batch_mean(diff::Tape& tape, Node total, std::size_t batch) {
  return tape.scale(total, 1.0 / static_cast<double>(batch));
}

// Visits every trainable matrix of the model with its tape input name.
void for_each_parameter(CcgmModel& model, const std::function<void(const std::string&, Matrix&)>& fn) {
  for (std::size_t i = 0; i < model.size(); ++i) {
    for (auto* net : {&model.encoders[i], &model.decoders[i]}) {
      const std::string prefix = net == &model.encoders[i] ? enc_name(i) : dec_name(i);
      for (std::size_t l = 0; l < net->layers(); ++l) {
        fn(prefix + ".W" + std::to_string(l), net->weights[l]);
        fn(prefix + ".b" + std::to_string(l), net->biases[l]);
      }
    }
  }
  for (std::size_t i = 0; i < model.size(); ++i) {
    if (model.registry.exogenous(i)) continue;
    for (auto [mask, prefix] : {std::pair{&model.masks.latent[i], gmask_name(i)}, {&model.masks.label[i], fmask_name(i)}}) {
      fn(prefix + ".W1", mask->w1);
      fn(prefix + ".b1", mask->b1);
      fn(prefix + ".W2", mask->w2);
      fn(prefix + ".b2", mask->b2);
    }
  }
}

Matrix constant_offsets(std::size_t rows, std::size_t cols, double v) { return Matrix(rows, cols, v); }

}  // namespace

BatchShape BatchShape::make(diff::Tape& tape, std::size_t batch, std::size_t concepts) {
  if (batch == 0 || concepts == 0) throw UsageError("batch shape must be non-empty");
  BatchShape s;
  s.batch = batch;
  s.concepts = concepts;
  s.ones_b = tape.constant(Matrix(batch, 1, 1.0));
  s.ones_n = tape.constant(Matrix(concepts, 1, 1.0));
  for (std::size_t i = 0; i < concepts; ++i) {
    Matrix col(concepts, 1, 0.0), row(1, concepts, 0.0);
    col[i] = 1.0;
    row[i] = 1.0;
    s.basis_col.push_back(tape.constant(col));
    s.basis_row.push_back(tape.constant(row));
  }
  return s;
}

Node BatchShape::column(diff::Tape& tape, Node x, std::size_t i) const { return tape.matmul(x, basis_col.at(i)); }

Node BatchShape::place(diff::Tape& tape, Node col, std::size_t i) const { return tape.matmul(col, basis_row.at(i)); }

Node BatchShape::masked_parents(diff::Tape& tape, Node x, Node g, std::size_t i) const {
  Node parents_row = tape.matmul(basis_row.at(i), g, false, true);  // (G e_i)^T
  return tape.hadamard(x, tape.matmul(ones_b, parents_row));
}

Node reconstruction_loss(diff::Tape& tape, Node u, Node u_hat, double sigma) {
  if (!(sigma > 0.0)) throw UsageError("reconstruction sigma must be positive");
  const std::size_t batch = tape.value(u).rows();
  Node sq = tape.sum(tape.square(tape.subtract(u, u_hat)));
  return tape.scale(sq, 0.5 / (sigma * sigma) / static_cast<double>(batch));
}

Node gaussian_kl(diff::Tape& tape, Node mu, Node log_var, std::optional<Node> target) {
  // Copy the sizes: pushing nodes below may reallocate the tape's storage.
  const std::size_t batch = tape.value(mu).rows();
  const std::size_t count = tape.value(mu).size();
  Node d = target ? tape.subtract(mu, *target) : mu;
  Node inner = tape.subtract(tape.add(tape.square(d), tape.exp(log_var)), log_var);
  Node total = tape.subtract(tape.sum(inner), tape.scalar(static_cast<double>(count)));
  return tape.scale(total, 0.5 / static_cast<double>(batch));
}

Node structural_loss(diff::Tape& tape, const BatchShape& shape, Node x, Node g,
                     const std::vector<std::optional<scm::MaskNodes>>& masks) {
  if (masks.size() != shape.concepts) throw UsageError("structural loss: one mask slot per concept");
  std::optional<Node> total;
  for (std::size_t i = 0; i < shape.concepts; ++i) {
    if (!masks[i]) continue;
    Node pred = scm::mask_forward(tape, *masks[i], shape.masked_parents(tape, x, g, i), shape.ones_b, shape.ones_n);
    Node term = tape.sum(tape.square(tape.subtract(shape.column(tape, x, i), pred)));
    total = total ? tape.add(*total, term) : term;
  }
  if (!total) return tape.scalar(0.0);
  return batch_mean(tape, *total, shape.batch);
}

Node linear_label_loss(diff::Tape& tape, Node u, Node a) {
  const std::size_t batch = tape.value(u).rows();
  return batch_mean(tape, tape.sum(tape.square(tape.subtract(u, tape.matmul(u, a)))), batch);
}

Node augmented_lagrangian(diff::Tape& tape, Node h, Node lambda, Node c) {
  return tape.add(tape.multiply(h, lambda), tape.scale(tape.multiply(tape.square(h), c), 0.5));
}

double gaussian_kl_value(std::span<const double> mu, std::span<const double> log_var) {
  if (mu.size() != log_var.size()) throw UsageError("kl: mean and log-variance differ in length");
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) s += mu[i] * mu[i] + std::exp(log_var[i]) - 1.0 - log_var[i];
  return 0.5 * s;
}

double conditional_prior_kl_value(std::span<const double> mu, std::span<const double> log_var,
                                  std::span<const double> un) {
  if (un.size() != mu.size()) throw UsageError("conditional kl: labels and means differ in length");
  std::vector<double> d(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (!(un[i] >= -1.0 && un[i] <= 1.0)) {
      throw UsageError("conditional kl: normalized label " + std::to_string(un[i]) + " outside [-1, 1]");
    }
    d[i] = mu[i] - un[i];
  }
  return gaussian_kl_value(d, log_var);
}

std::vector<std::string> parameter_names(const CcgmModel& model) {
  std::vector<std::string> names{"G"};
  for_each_parameter(const_cast<CcgmModel&>(model), [&](const std::string& n, Matrix&) { names.push_back(n); });
  return names;
}

TrainGraph::TrainGraph(const CcgmModel& model, std::size_t batch) : batch_(batch) {
  diff::Tape& t = tape_;
  const std::size_t n = model.size();
  const BatchShape shape = BatchShape::make(t, batch, n);

  Node u = t.input("u", batch, n);
  Node eps = t.input("eps", batch, n);
  Node lambda = t.input("lambda", 1, 1);
  Node c = t.input("c", 1, 1);
  Node g_raw = t.input("G", n, n);
  // Structural zeros are enforced through a constant mask, so their
  // gradients are zero too.
  Node g = t.hadamard(g_raw, t.constant(model.adjacency.trainable_mask()));

  std::optional<Node> mu, raw;
  for (std::size_t i = 0; i < n; ++i) {
    auto nodes = add_mlp_inputs(t, enc_name(i), model.encoders[i]);
    Node out = mlp_forward(t, nodes, shape.column(t, u, i), shape.ones_b);  // B x 2
    Matrix pick_mu(2, n, 0.0), pick_raw(2, n, 0.0);
    pick_mu(0, i) = 1.0;
    pick_raw(1, i) = 1.0;
    Node m = t.matmul(out, t.constant(pick_mu));
    Node r = t.matmul(out, t.constant(pick_raw));
    mu = mu ? t.add(*mu, m) : m;
    raw = raw ? t.add(*raw, r) : r;
  }
  Node log_var = t.add(t.constant(constant_offsets(batch, n, kLogVarCenter)), t.scale(t.tanh(*raw), kLogVarHalfWidth));
  Node z = t.add(*mu, t.hadamard(t.exp(t.scale(log_var, 0.5)), eps));

  std::vector<std::optional<scm::MaskNodes>> gmasks(n), fmasks(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (model.registry.exogenous(i)) continue;
    gmasks[i] = scm::add_mask_inputs(t, gmask_name(i), model.masks.latent[i]);
    fmasks[i] = scm::add_mask_inputs(t, fmask_name(i), model.masks.label[i]);
  }

  std::optional<Node> u_hat;
  for (std::size_t i = 0; i < n; ++i) {
    Node z_hat_i = gmasks[i] ? scm::mask_forward(t, *gmasks[i], shape.masked_parents(t, z, g, i), shape.ones_b, shape.ones_n)
                             : shape.column(t, z, i);
    auto nodes = add_mlp_inputs(t, dec_name(i), model.decoders[i]);
    Node placed = shape.place(t, mlp_forward(t, nodes, z_hat_i, shape.ones_b), i);
    u_hat = u_hat ? t.add(*u_hat, placed) : placed;
  }

  const TrainConfig& cfg = model.config;
  nodes_.recon = reconstruction_loss(t, u, *u_hat, cfg.recon_sigma);
  nodes_.kl = gaussian_kl(t, *mu, log_var);
  nodes_.kl_u = gaussian_kl(t, *mu, log_var, u);
  nodes_.label = structural_loss(t, shape, u, g, fmasks);
  nodes_.latent = structural_loss(t, shape, z, g, gmasks);
  nodes_.h = scm::dag_penalty(t, g);
  nodes_.elbo = t.add(nodes_.recon, nodes_.kl);
  Node total = t.add(t.scale(nodes_.elbo, cfg.w_elbo), t.scale(nodes_.label, cfg.w_u));
  total = t.add(total, t.scale(nodes_.latent, cfg.w_z));
  total = t.add(total, t.scale(nodes_.kl_u, cfg.w_klu));
  nodes_.total = t.add(total, augmented_lagrangian(t, nodes_.h, lambda, c));
  bind_parameters(model);
}

void TrainGraph::bind_parameters(const CcgmModel& model) {
  tape_.bind("G", model.adjacency.g());
  for_each_parameter(const_cast<CcgmModel&>(model), [&](const std::string& n, Matrix& m) { tape_.bind(n, m); });
}

void TrainGraph::bind_batch(const Matrix& u, const Matrix& eps, double lambda, double c) {
  tape_.bind("u", u);
  tape_.bind("eps", eps);
  tape_.bind("lambda", Matrix::scalar(lambda));
  tape_.bind("c", Matrix::scalar(c));
}

void TrainGraph::evaluate() {
  tape_.forward(nodes_.total);
  tape_.backward(nodes_.total);
}

void TrainGraph::sgd_step(CcgmModel& model, double lr, bool update_g) const {
  if (update_g) {
    Matrix g = model.adjacency.g();
    simd::axpy(-lr, tape_.gradient("G").values(), g.values());
    model.adjacency.set_g(g);
  }
  for_each_parameter(model, [&](const std::string& n, Matrix& m) { simd::axpy(-lr, tape_.gradient(n).values(), m.values()); });
}

PretrainGraph::PretrainGraph(const CcgmModel& model, std::size_t batch) {
  diff::Tape& t = tape_;
  const std::size_t n = model.size();
  Node u = t.input("u", batch, n);
  Node lambda = t.input("lambda", 1, 1);
  Node c = t.input("c", 1, 1);
  Node g = t.hadamard(t.input("G", n, n), t.constant(model.adjacency.trainable_mask()));
  Node a = t.add(g, t.constant(model.adjacency.b()));
  label_ = linear_label_loss(t, u, a);
  total_ = t.add(label_, augmented_lagrangian(t, scm::dag_penalty(t, g), lambda, c));
}

void PretrainGraph::bind(const Matrix& g, const Matrix& u, double lambda, double c) {
  tape_.bind("G", g);
  tape_.bind("u", u);
  tape_.bind("lambda", Matrix::scalar(lambda));
  tape_.bind("c", Matrix::scalar(c));
}

double PretrainGraph::evaluate() {
  const double v = tape_.forward(total_)[0];
  tape_.backward(total_);
  return v;
}

}  // namespace ccgm::model
