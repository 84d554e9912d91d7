#include "ccgm/est/outcome.hpp"

#include <Eigen/Dense>

#include "ccgm/error.hpp"

namespace ccgm::est {

double OutcomeModel::predict(int arm, std::span<const double> x) const {
  const auto& b = arm == 1 ? treated : control;
  if (x.size() + 1 != b.size()) throw UsageError("outcome model: covariate count mismatch");
  double v = b[0];
  for (std::size_t j = 0; j < x.size(); ++j) v += b[j + 1] * x[j];
  return v;
}

OutcomeModel OutcomeModel::zero(std::size_t confounders) {
  return {std::vector<double>(confounders + 1, 0.0), std::vector<double>(confounders + 1, 0.0)};
}

namespace {

std::vector<double> fit_arm(const EffectData& data, double arm) {
  const auto k = static_cast<Eigen::Index>(data.x.cols());
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < data.size(); ++i)
    if (data.d[i] == arm) rows.push_back(i);
  if (rows.size() < static_cast<std::size_t>(2 + k)) {
    throw UsageError("outcome model: arm " + std::to_string(static_cast<int>(arm)) + " has " +
                     std::to_string(rows.size()) + " rows, needs at least " + std::to_string(2 + k));
  }
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), k + 1);
  Eigen::VectorXd y(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    x(i, 0) = 1.0;
    for (Eigen::Index j = 0; j < k; ++j) x(i, j + 1) = data.x(rows[i], j);
    y[i] = data.y[rows[i]];
  }
  const Eigen::VectorXd b = x.colPivHouseholderQr().solve(y);
  if (!b.allFinite()) throw NumericError("outcome model: least-squares fit is not finite");
  return {b.data(), b.data() + b.size()};
}

}  // namespace

OutcomeModel fit_outcome(const EffectData& data) { return {fit_arm(data, 0.0), fit_arm(data, 1.0)}; }

}  // namespace ccgm::est
