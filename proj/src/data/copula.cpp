#include "ccgm/data/copula.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "ccgm/error.hpp"

namespace ccgm::data {

namespace {

using Eigen::MatrixXd;

MatrixXd to_eigen(const Matrix& m) {
  MatrixXd e(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) e(r, c) = m(r, c);
  return e;
}

Matrix from_eigen(const MatrixXd& e) {
  Matrix m(e.rows(), e.cols());
  for (Eigen::Index r = 0; r < e.rows(); ++r)
    for (Eigen::Index c = 0; c < e.cols(); ++c) m(r, c) = e(r, c);
  return m;
}

// F with F F^T = R for a PSD R.
MatrixXd psd_factor(const MatrixXd& r) {
  Eigen::LLT<MatrixXd> llt(r);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(r);
  return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Pearson correlation of the transformed pair per unit latent correlation,
// where it is linear in the latent value.
double latent_for(double rho, MarginalKind a, MarginalKind b) {
  using K = MarginalKind;
  if (a == K::Normal && b == K::Normal) return rho;
  if (a == K::Uniform && b == K::Uniform) return 2.0 * std::sin(std::numbers::pi * rho / 6.0);
  // corr(Phi(X), Y) = rho * sqrt(3 / pi) for standard normal X, Y.
  return rho / std::sqrt(3.0 / std::numbers::pi);
}

}  // namespace

CopulaSpec mindset_spec(std::size_t rows, std::uint64_t seed) {
  CopulaSpec s;
  s.names = {"SM", "SE", "D", "Y"};
  s.roles = {ColumnRole::Confounder, ColumnRole::Confounder, ColumnRole::Treatment, ColumnRole::Outcome};
  s.exogenous = {true, true, false, false};
  s.correlation = Matrix{{1.0, -0.054, -0.046, -0.111},
                         {-0.054, 1.0, 0.059, 0.439},
                         {-0.046, 0.059, 1.0, 0.221},
                         {-0.111, 0.439, 0.221, 1.0}};
  s.marginals = {Marginal{}, Marginal{}, Marginal{MarginalKind::Uniform}, Marginal{}};
  s.rows = rows;
  s.seed = seed;
  return s;
}

Matrix repair_correlation(const Matrix& r, double tolerance) {
  if (!r.is_square() || r.rows() == 0) throw UsageError("correlation matrix must be square and non-empty");
  const std::size_t k = r.rows();
  for (std::size_t i = 0; i < k; ++i) {
    if (std::abs(r(i, i) - 1.0) > 1e-12) throw UsageError("correlation matrix diagonal must be 1");
    for (std::size_t j = 0; j < k; ++j) {
      if (!std::isfinite(r(i, j)) || std::abs(r(i, j)) > 1.0) {
        throw UsageError("correlation entry (" + std::to_string(i) + ", " + std::to_string(j) +
                         ") outside [-1, 1]");
      }
      if (std::abs(r(i, j) - r(j, i)) > 1e-12) throw UsageError("correlation matrix is not symmetric");
    }
  }
  MatrixXd e = to_eigen(r);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(e);
  const double min_eig = es.eigenvalues().minCoeff();
  if (min_eig >= 0.0) return r;
  if (min_eig < -tolerance) {
    throw UsageError("correlation matrix is not positive semi-definite (smallest eigenvalue " +
                     std::to_string(min_eig) + ")");
  }
  MatrixXd fixed = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).asDiagonal() * es.eigenvectors().transpose();
  Eigen::VectorXd d = fixed.diagonal().cwiseSqrt().cwiseInverse();
  fixed = d.asDiagonal() * fixed * d.asDiagonal();
  return from_eigen(fixed);
}

Matrix latent_correlation(const Matrix& target, const std::vector<Marginal>& marginals) {
  if (marginals.size() != target.rows()) throw UsageError("copula: one marginal per variable required");
  Matrix out = target;
  for (std::size_t i = 0; i < target.rows(); ++i)
    for (std::size_t j = 0; j < target.cols(); ++j) {
      if (i == j) continue;
      const double v = latent_for(target(i, j), marginals[i].kind, marginals[j].kind);
      if (std::abs(v) > 1.0) {
        throw UsageError("copula: correlation " + std::to_string(target(i, j)) + " between variables " +
                         std::to_string(i) + " and " + std::to_string(j) + " is unreachable with these marginals");
      }
      out(i, j) = v;
    }
  return out;
}

DataTable simulate_copula(const CopulaSpec& spec) {
  const std::size_t k = spec.names.size();
  if (k == 0) throw UsageError("copula: no variables");
  if (spec.rows == 0) throw UsageError("copula: row count must be positive");
  if (spec.correlation.rows() != k || spec.correlation.cols() != k) {
    throw UsageError("copula: correlation is " + spec.correlation.shape_string() + " for " + std::to_string(k) +
                     " variables");
  }
  if (spec.marginals.size() != k) throw UsageError("copula: one marginal per variable required");
  for (const auto& m : spec.marginals) {
    if (m.kind == MarginalKind::Normal && !(m.stddev > 0.0 && std::isfinite(m.mean))) {
      throw UsageError("copula: normal marginal needs a finite mean and positive std");
    }
  }
  const Matrix target = repair_correlation(spec.correlation);
  const Matrix latent = repair_correlation(latent_correlation(target, spec.marginals));
  const MatrixXd factor = psd_factor(to_eigen(latent));

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto n = static_cast<Eigen::Index>(spec.rows);
  MatrixXd x(n, static_cast<Eigen::Index>(k));
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < x.cols(); ++c) x(r, c) = normal(rng);

  if (spec.match_moments && spec.rows > k + 1) {
    x.rowwise() -= x.colwise().mean();
    const MatrixXd cov = (x.transpose() * x) / static_cast<double>(n - 1);
    Eigen::LLT<MatrixXd> llt(cov);
    if (llt.info() == Eigen::Success) {
      // x L^{-T} has identity sample covariance.
      x = llt.matrixU().solve<Eigen::OnTheRight>(x);
    }
  }
  const MatrixXd z = x * factor.transpose();

  DataTable t(spec.names, spec.roles);
  t.reserve_rows(spec.rows);
  std::vector<double> row(k);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < k; ++c) {
      const double v = z(r, static_cast<Eigen::Index>(c));
      const auto& m = spec.marginals[c];
      row[c] = m.kind == MarginalKind::Uniform ? normal_cdf(v) : m.mean + m.stddev * v;
    }
    t.add_row(row);
  }
  t.set_provenance("gaussian copula n=" + std::to_string(spec.rows) + ", seed " + std::to_string(spec.seed));
  return t;
}

CopulaSpec copula_from_json(const nlohmann::json& j, std::size_t rows, std::uint64_t seed) {
  try {
    CopulaSpec s;
    for (const auto& v : j.at("variables")) {
      s.names.push_back(v.at("name").get<std::string>());
      s.roles.push_back(parse_role(v.value("role", "other")));
      const std::string kind = v.value("marginal", "normal");
      Marginal m;
      if (kind == "uniform") {
        m.kind = MarginalKind::Uniform;
      } else if (kind == "normal") {
        m.mean = v.value("mean", 0.0);
        m.stddev = v.value("std", 1.0);
      } else {
        throw UsageError("copula: unknown marginal '" + kind + "' (normal or uniform)");
      }
      s.marginals.push_back(m);
      s.exogenous.push_back(v.value("exogenous", s.roles.back() == ColumnRole::Confounder));
    }
    s.correlation = scm::matrix_from_json(j.at("correlation"));
    s.rows = rows;
    s.seed = seed;
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("copula spec: ") + e.what());
  }
}

}  // namespace ccgm::data
