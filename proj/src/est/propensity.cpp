#include "ccgm/est/propensity.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "ccgm/error.hpp"

namespace ccgm::est {

namespace {

double sigmoid(double t) { return t >= 0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t)); }

// log(1 + e^t) without overflow.
double softplus(double t) { return t > 0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t)); }

double log_likelihood(const Eigen::MatrixXd& x, const Eigen::VectorXd& d, const Eigen::VectorXd& beta) {
  const Eigen::VectorXd eta = x * beta;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) ll += d[i] * eta[i] - softplus(eta[i]);
  return ll;
}

}  // namespace

double PropensityModel::predict(std::span<const double> x) const {
  if (x.size() + 1 != coefficients.size()) throw UsageError("propensity: covariate count mismatch");
  double eta = coefficients[0];
  for (std::size_t j = 0; j < x.size(); ++j) eta += coefficients[j + 1] * x[j];
  return std::clamp(sigmoid(eta), kPropensityClip, 1.0 - kPropensityClip);
}

std::vector<double> PropensityModel::predict_all(const Matrix& x) const {
  std::vector<double> p(x.rows());
  for (std::size_t r = 0; r < x.rows(); ++r) p[r] = predict(x.row_span(r));
  return p;
}

PropensityModel PropensityModel::constant(double p, std::size_t confounders) {
  if (!(p > 0.0 && p < 1.0)) throw UsageError("constant propensity must lie in (0, 1)");
  PropensityModel m;
  m.coefficients.assign(confounders + 1, 0.0);
  m.coefficients[0] = std::log(p / (1.0 - p));
  m.converged = true;
  return m;
}

PropensityModel fit_propensity(const EffectData& data) {
  const auto n = static_cast<Eigen::Index>(data.size());
  const auto k = static_cast<Eigen::Index>(data.x.cols());
  if (n == 0) throw UsageError("propensity: no rows");
  if (k == 0) throw UsageError("propensity: needs at least one confounder column");

  Eigen::MatrixXd x(n, k + 1);
  Eigen::VectorXd d(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    for (Eigen::Index j = 0; j < k; ++j) x(i, j + 1) = data.x(i, j);
    d[i] = data.d[i];
  }

  constexpr int kMaxIter = 100;
  constexpr double kStepTol = 1e-8;
  // Beyond this, fitted probabilities are within float noise of 0 or 1.
  constexpr double kSeparationBound = 30.0;

  PropensityModel m;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(k + 1);
  double ll = log_likelihood(x, d, beta);
  for (int it = 1; it <= kMaxIter; ++it) {
    m.iterations = it;
    const Eigen::VectorXd eta = x * beta;
    Eigen::VectorXd p(n), w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      p[i] = sigmoid(eta[i]);
      w[i] = std::max(p[i] * (1.0 - p[i]), 1e-12);
    }
    const Eigen::VectorXd grad = x.transpose() * (d - p);
    const Eigen::MatrixXd hess = x.transpose() * w.asDiagonal() * x;
    const Eigen::VectorXd step = hess.ldlt().solve(grad);
    if (!step.allFinite()) break;

    // Halve until the likelihood does not drop.
    double scale = 1.0;
    Eigen::VectorXd next = beta + step;
    double ll_next = log_likelihood(x, d, next);
    while (ll_next < ll - 1e-12 && scale > 1e-6) {
      scale *= 0.5;
      next = beta + scale * step;
      ll_next = log_likelihood(x, d, next);
    }
    const double moved = (scale * step).cwiseAbs().maxCoeff();
    beta = next;
    ll = ll_next;
    if (beta.cwiseAbs().maxCoeff() > kSeparationBound) {
      m.separated = true;
      break;
    }
    if (moved < kStepTol) {
      m.converged = true;
      break;
    }
  }
  m.coefficients.assign(beta.data(), beta.data() + beta.size());
  m.log_likelihood = ll;
  return m;
}

}  // namespace ccgm::est
