#pragma once
// Loss terms recorded on a tape, plus the assembled pre-training and main
// training graphs. All batch losses are means over rows of per-row sums.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ccgm/diff/tape.hpp"
#include "ccgm/model/ccgm_model.hpp"
#include "ccgm/scm/mask.hpp"

namespace ccgm::model {

// Constants shared by the per-concept plumbing of a B x n batch.
struct BatchShape {
  std::size_t batch = 0;
  std::size_t concepts = 0;
  Node ones_b{};                  // B x 1
  Node ones_n{};                  // n x 1
  std::vector<Node> basis_col;    // e_i, n x 1
  std::vector<Node> basis_row;    // e_i^T, 1 x n

  static BatchShape make(diff::Tape& tape, std::size_t batch, std::size_t concepts);
  Node column(diff::Tape& tape, Node x, std::size_t i) const;   // B x 1
  Node place(diff::Tape& tape, Node col, std::size_t i) const;  // B x n with col in slot i
  // x o (1_B G[:, i]^T): every row of x masked by the parent weights of i.
  Node masked_parents(diff::Tape& tape, Node x, Node g, std::size_t i) const;
};

// 0.5 / sigma^2 * mean_b sum_i (u - u_hat)^2
Node reconstruction_loss(diff::Tape& tape, Node u, Node u_hat, double sigma);
// KL(N(mu, e^lv) || N(target, I)), target = 0 when absent; mean over rows.
Node gaussian_kl(diff::Tape& tape, Node mu, Node log_var, std::optional<Node> target = std::nullopt);
// mean_b sum_{i endogenous} (x_i - m_i(x o G[:, i]))^2 with mask nets m_i.
Node structural_loss(diff::Tape& tape, const BatchShape& shape, Node x, Node g,
                     const std::vector<std::optional<scm::MaskNodes>>& masks);
// Linear form: mean_b sum_i (u - u A)^2.
Node linear_label_loss(diff::Tape& tape, Node u, Node a);
// lambda H + c / 2 H^2
Node augmented_lagrangian(diff::Tape& tape, Node h, Node lambda, Node c);

// Closed-form values for single rows (used by tests and diagnostics).
double gaussian_kl_value(std::span<const double> mu, std::span<const double> log_var);
// KL to N(u_n, I); UsageError if any label is outside [-1, 1].
double conditional_prior_kl_value(std::span<const double> mu, std::span<const double> log_var,
                                  std::span<const double> un);

struct LossNodes {
  Node total{}, elbo{}, recon{}, kl{}, kl_u{}, label{}, latent{}, h{};
};

// Tape of the full objective for a fixed batch size. Inputs: "u", "eps" (data),
// "lambda", "c" (scheduler) and every model parameter by name.
class TrainGraph {
 public:
  TrainGraph(const CcgmModel& model, std::size_t batch);

  void bind_parameters(const CcgmModel& model);
  void bind_batch(const Matrix& u, const Matrix& eps, double lambda, double c);
  // Forward + backward; returns the loss values.
  void evaluate();
  double value(Node n) const { return tape_.value(n)[0]; }
  const LossNodes& losses() const noexcept { return nodes_; }
  // Applies p -= lr * dL/dp to every parameter of the model.
  void sgd_step(CcgmModel& model, double lr, bool update_g = true) const;

  diff::Tape& tape() noexcept { return tape_; }

 private:
  diff::Tape tape_;
  LossNodes nodes_;
  std::size_t batch_;
};

// Linear label loss + augmented Lagrangian on G only.
class PretrainGraph {
 public:
  PretrainGraph(const CcgmModel& model, std::size_t batch);
  void bind(const Matrix& g, const Matrix& u, double lambda, double c);
  double evaluate();  // forward + backward, returns the loss
  double label_loss() const { return tape_.value(label_)[0]; }
  Node total() const noexcept { return total_; }
  const Matrix& gradient() const { return tape_.gradient("G"); }
  diff::Tape& tape() noexcept { return tape_; }

 private:
  diff::Tape tape_;
  Node total_{}, label_{};
};

// Names of the tape inputs holding parameters, in a fixed order.
std::vector<std::string> parameter_names(const CcgmModel& model);

}  // namespace ccgm::model
