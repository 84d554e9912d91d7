#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "ccgm/diff/grad_check.hpp"
#include "ccgm/error.hpp"
#include "ccgm/scm/adjacency.hpp"
#include "ccgm/scm/causal_layer.hpp"
#include "ccgm/scm/mask.hpp"

using namespace ccgm::scm;

namespace {

const std::vector<bool> kPendulumRoles = {true, true, false, false};
enum { kTheta, kSun, kWidth, kPos };

ConceptRegistry pendulum_registry() {
  return ConceptRegistry({"theta", "x_sun", "w_shadow", "x_shadow"}, kPendulumRoles,
                         std::vector<ConceptRange>(4, ConceptRange{-1, 1}));
}

AdjacencySpec pendulum_adjacency() {
  Matrix g(4, 4);
  g(kTheta, kWidth) = 0.4;
  g(kTheta, kPos) = 0.5;
  g(kSun, kWidth) = -0.3;
  g(kSun, kPos) = 0.8;
  return AdjacencySpec(g, kPendulumRoles);
}

std::vector<MaskNet> random_masks(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 0.7);
  std::vector<MaskNet> out;
  for (std::size_t i = 0; i < n; ++i) {
    MaskNet m = MaskNet::summation(n, 16, rng);
    for (double& w : m.b1.values()) w = normal(rng);
    for (double& w : m.w2.values()) w = normal(rng);
    m.b2[0] = normal(rng);
    out.push_back(m);
  }
  return out;
}

// Independent evaluation of g(v) = sum(v) + w2 . tanh(W1 v + b1) + b2.
double mask_oracle(const MaskNet& m, const std::vector<double>& v) {
  long double out = m.b2(0, 0);
  for (double x : v) out += x;
  for (std::size_t h = 0; h < m.w1.rows(); ++h) {
    long double pre = m.b1(0, h);
    for (std::size_t j = 0; j < v.size(); ++j) pre += static_cast<long double>(m.w1(h, j)) * v[j];
    out += m.w2(h, 0) * std::tanh(static_cast<double>(pre));
  }
  return static_cast<double>(out);
}

}  // namespace

TEST_CASE("dag penalty examples") {
  CHECK(dag_penalty(Matrix(3, 3)) == 0.0);
  CHECK(dag_penalty(Matrix{{0, 1, 2}, {0, 0, 3}, {0, 0, 0}}) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(dag_penalty(Matrix{{0, 1}, {1, 0}}) == doctest::Approx(2.0));
  CHECK_THROWS_AS(dag_penalty(Matrix(2, 3)), ccgm::UsageError);
}

TEST_CASE("dag penalty vanishes on permuted triangular matrices and not on short cycles (n = 4)") {
  std::vector<std::size_t> perm = {0, 1, 2, 3};
  Matrix upper(4, 4);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) upper(i, j) = 1.0 + 0.5 * static_cast<double>(i + j);
  do {
    Matrix p(4, 4);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) p(perm[i], perm[j]) = upper(i, j);
    CHECK(dag_penalty(p) <= 1e-9);
  } while (std::next_permutation(perm.begin(), perm.end()));

  // Every 2-cycle and every directed 3-cycle with unit weights.
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      if (i == j) continue;
      Matrix g(4, 4);
      g(i, j) = g(j, i) = 1.0;
      CHECK(dag_penalty(g) >= 1e-6);
      for (std::size_t k = 0; k < 4; ++k) {
        if (k == i || k == j) continue;
        Matrix c(4, 4);
        c(i, j) = c(j, k) = c(k, i) = 1.0;
        CHECK(dag_penalty(c) >= 1e-6);
      }
    }
}

TEST_CASE("dag penalty on the tape matches and differentiates") {
  ccgm::diff::Tape t;
  auto g = t.input("G", 4, 4);
  auto h = dag_penalty(t, g);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 0.4);
  Matrix gv(4, 4);
  for (double& x : gv.values()) x = n(rng);
  t.bind("G", gv);
  CHECK(t.forward(h)[0] == doctest::Approx(dag_penalty(gv)).epsilon(1e-12));
  CHECK(ccgm::diff::grad_check_input(t, h, "G", gv, 1e-6).ok(1e-6));
}

TEST_CASE("lagrangian step examples") {
  const double inf = std::numeric_limits<double>::infinity();
  auto a = lagrangian_step(0.0, 1.0, 2.0, inf);
  CHECK(a.lambda == 2.0);
  CHECK(a.c == 1.0);
  auto b = lagrangian_step(2.0, 1.0, 1.9, 2.0);
  CHECK(b.lambda == doctest::Approx(3.9));
  CHECK(b.c == 2.0);
  auto c = lagrangian_step(2.0, 1.0, 0.0, 2.0);
  CHECK(c.lambda == 2.0);
  CHECK(c.c == 1.0);
  CHECK_THROWS_AS(lagrangian_step(0.0, 0.0, 1.0, 1.0), ccgm::UsageError);
  CHECK_THROWS_AS(lagrangian_step(std::nan(""), 1.0, 1.0, 1.0), ccgm::NumericError);
  CHECK_THROWS_AS(lagrangian_step(0.0, 1.0, inf, 1.0), ccgm::NumericError);
}

TEST_CASE("scheduler holds c at the cap and below tolerance") {
  SchedulerParams p;
  CHECK(lagrangian_step(0.0, p.c_max, 1.0, 1.0, p).c == p.c_max);
  CHECK(lagrangian_step(0.0, 1.0, 1e-12, 1e-12, p).c == 1.0);
  SchedulerState s;
  s = advance(s, 2.0, p);
  CHECK(s.c == 1.0);
  CHECK(s.h_prev == 2.0);
  s = advance(s, 1.95, p);
  CHECK(s.c == 2.0);
}

TEST_CASE("adjacency invariants") {
  CHECK_THROWS_AS(AdjacencySpec(Matrix{{1, 0}, {0, 0}}, {false, false}), ccgm::UsageError);
  CHECK_THROWS_AS(AdjacencySpec(Matrix{{0, 1}, {0, 0}}, {false, true}), ccgm::UsageError);
  CHECK_THROWS_AS(AdjacencySpec(Matrix(2, 3), {false, false}), ccgm::UsageError);
  auto a = pendulum_adjacency();
  CHECK(a.a()(kTheta, kTheta) == 1.0);
  CHECK(a.a()(kWidth, kWidth) == 0.0);
  CHECK(a.trainable_mask()(kTheta, kPos) == 1.0);
  CHECK(a.trainable_mask()(kPos, kTheta) == 0.0);
  CHECK_NOTHROW(check_compatible(a, pendulum_registry()));
  CHECK_THROWS_AS(check_compatible(AdjacencySpec({true, false, false, false}), pendulum_registry()),
                  ccgm::UsageError);
  CHECK_THROWS_AS(ConceptRegistry({"a", "a"}, {true, false}, {{0, 1}, {0, 1}}), ccgm::UsageError);
  CHECK_THROWS_AS(ConceptRegistry({"a"}, {true}, {{1, 1}}), ccgm::UsageError);
  CHECK_THROWS_AS(pendulum_registry().index_of("phi"), ccgm::UsageError);
}

TEST_CASE("linear forward examples") {
  AdjacencySpec id({true, true, true});
  std::vector<double> z = {0.1, -2, 3};
  CHECK(causal_forward_linear(id, z) == z);

  Matrix g(4, 4);
  g(kTheta, kPos) = 0.5;
  AdjacencySpec a(g, kPendulumRoles);
  CHECK(causal_forward_linear(a, std::vector<double>{1, 0, 0, 0})[kPos] == 0.5);
  auto out = causal_forward_linear(a, std::vector<double>{1, 0, 0, 99});
  CHECK(out[kWidth] == 0.0);
  CHECK(out[kPos] == 0.5);
  CHECK_THROWS_AS(causal_forward_linear(a, std::vector<double>{1, 2}), ccgm::UsageError);
}

TEST_CASE("masked forward") {
  auto a = pendulum_adjacency();
  std::mt19937_64 rng(7);
  auto init = MaskSet::summation(4, 16, rng);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> z(4);
    for (double& x : z) x = u(rng);
    auto lin = causal_forward_linear(a, z);
    auto msk = causal_forward_masked(a, init.latent, z);
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(lin[i] - msk[i]) <= 1e-12);
  }

  auto masks = random_masks(4, 8);
  std::vector<double> z = {0.3, -0.6, 0.9, -0.2};
  auto out = causal_forward_masked(a, masks, z);
  for (std::size_t i : {kWidth, kPos}) {
    std::vector<double> v(4);
    for (std::size_t j = 0; j < 4; ++j) v[j] = a.a()(j, i) * z[j];
    CHECK(out[i] == doctest::Approx(mask_oracle(masks[i], v)).epsilon(1e-13));
  }
  CHECK(out[kTheta] == z[kTheta]);

  auto cut = remove_edge(remove_edge(a, kTheta, kPos), kSun, kPos);
  const std::vector<double> zero(4, 0.0);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> zz(4);
    for (double& x : zz) x = u(rng);
    CHECK(causal_forward_masked(cut, masks, zz)[kPos] == masks[kPos](zero));
  }
  CHECK_THROWS_AS(causal_forward_masked(a, std::span(masks).first(3), z), ccgm::UsageError);
}

TEST_CASE("interventions on the pendulum graph") {
  auto reg = pendulum_registry();
  auto a = pendulum_adjacency();
  auto masks = random_masks(4, 21);
  std::vector<double> z = {0.2, -0.4, 0.1, 0.6};
  auto base = apply_intervention(a, masks, z, InterventionSpec{}, reg);

  auto child = apply_intervention(a, masks, z, InterventionSpec{{}, {{"x_shadow", 0.7}}}, reg);
  CHECK(child[kTheta] == base[kTheta]);
  CHECK(child[kSun] == base[kSun]);
  CHECK(child[kWidth] == base[kWidth]);
  CHECK(child[kPos] == 0.7);

  std::vector<std::vector<double>> sweep;
  for (double t : {-1.0, -0.5, 0.0, 0.5, 1.0})
    sweep.push_back(apply_intervention(a, masks, z, InterventionSpec{{}, {{"theta", t}}}, reg));
  for (const auto& row : sweep) CHECK(row[kSun] == base[kSun]);
  CHECK(sweep.front()[kPos] != sweep.back()[kPos]);
  CHECK(sweep.front()[kWidth] != sweep.back()[kWidth]);

  InterventionSpec cf{{{"theta", "x_shadow"}}, {}};
  std::vector<std::vector<double>> cut;
  for (double t : {-1.0, 0.0, 1.0}) {
    cf.clamps = {{"theta", t}};
    cut.push_back(apply_intervention(a, masks, z, cf, reg));
  }
  CHECK(cut[0][kPos] == cut[2][kPos]);
  CHECK(cut[0][kWidth] != cut[2][kWidth]);

  CHECK_THROWS_AS(apply_intervention(a, masks, z, InterventionSpec{{}, {{"phi", 1.0}}}, reg), ccgm::UsageError);
  CHECK_THROWS_AS(apply_intervention(a, masks, z, InterventionSpec{{}, {{"theta", 1.0}, {"theta", 0.0}}}, reg),
                  ccgm::UsageError);
  CHECK_THROWS_AS(
      apply_intervention(a, masks, z, InterventionSpec{{{"theta", "x_shadow"}, {"theta", "x_shadow"}}, {}}, reg),
      ccgm::UsageError);
  // Clamping the child of a removed edge is allowed.
  CHECK_NOTHROW(apply_intervention(a, masks, z, InterventionSpec{{{"theta", "x_shadow"}}, {{"x_shadow", 0.1}}}, reg));
}

TEST_CASE("asymmetry and locality on random chains") {
  // Chain 0 -> 2 -> 3 -> 4 with 1 -> 3; concepts 0 and 1 exogenous.
  const std::vector<bool> roles = {true, true, false, false, false};
  Matrix g(5, 5);
  g(0, 2) = 0.9;
  g(2, 3) = -0.7;
  g(1, 3) = 0.4;
  g(3, 4) = 1.1;
  AdjacencySpec a(g, roles);
  auto masks = random_masks(5, 33);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> z(5);
    for (double& x : z) x = u(rng);
    auto base = apply_intervention(a, masks, z, ResolvedIntervention{});
    for (std::size_t c = 2; c < 5; ++c) {
      auto out = apply_intervention(a, masks, z, ResolvedIntervention{{}, {{c, u(rng)}}});
      CHECK(out[0] == base[0]);
      CHECK(out[1] == base[1]);
      for (std::size_t k = 2; k < c; ++k) CHECK(out[k] == base[k]);
    }
    // Removing 1 -> 3 touches only 3 and its descendant 4.
    auto out = apply_intervention(a, masks, z, ResolvedIntervention{{{1, 3}}, {}});
    CHECK(out[0] == base[0]);
    CHECK(out[1] == base[1]);
    CHECK(out[2] == base[2]);
  }
}

TEST_CASE("edge removal and thresholding") {
  auto reg = pendulum_registry();
  auto a = pendulum_adjacency();
  CHECK(remove_edge(a, kPos, kWidth) == a);
  CHECK(threshold_adjacency(a, 0.1).size() == 4);
  auto b = remove_edge(a, reg, "x_sun", "x_shadow");
  CHECK(a.weight(kSun, kPos) == 0.8);
  auto edges = threshold_adjacency(b, 0.1);
  CHECK(edges.size() == 3);
  CHECK(std::find(edges.begin(), edges.end(), Edge{kSun, kPos}) == edges.end());
  CHECK(format_edges(edges, reg) == "theta->w_shadow, theta->x_shadow, x_sun->w_shadow");
  CHECK(threshold_adjacency(AdjacencySpec({false, false}), 0.0).empty());
  CHECK(threshold_adjacency(a, std::numeric_limits<double>::infinity()).empty());
  CHECK_THROWS_AS(threshold_adjacency(a, -1.0), ccgm::UsageError);
  CHECK_THROWS_AS(remove_edge(a, 1, 1), ccgm::UsageError);
  CHECK_THROWS_AS(remove_edge(a, reg, "theta", "phi"), ccgm::UsageError);
}

TEST_CASE("removing an edge never increases the dag penalty (random 4x4)") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> n(0.0, 0.8);
  std::bernoulli_distribution keep(0.5);
  for (int trial = 0; trial < 200; ++trial) {
    Matrix g(4, 4);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        if (i != j && keep(rng)) g(i, j) = n(rng);
    AdjacencySpec a(g, std::vector<bool>(4, false));
    const double h = dag_penalty(g);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) {
        if (i == j) continue;
        CHECK(dag_penalty(remove_edge(a, i, j).g()) <= h + 1e-12);
      }
  }
}

TEST_CASE("adjacency json round-trip is bit exact") {
  auto a = pendulum_adjacency();
  Matrix g = a.g();
  g(kTheta, kPos) = 0.1 + 0.2;  // not representable in short decimal
  g(kSun, kWidth) = -1.0 / 3.0;
  a.set_g(g);
  auto j = adjacency_to_json(a, pendulum_registry().names());
  auto back = adjacency_from_json(nlohmann::json::parse(j.dump()));
  CHECK(back.adjacency == a);
  CHECK(back.concepts == pendulum_registry().names());
  j["G"][0][0] = 1.0;
  CHECK_THROWS_AS(adjacency_from_json(j), ccgm::UsageError);
  CHECK_THROWS_AS(adjacency_from_json(nlohmann::json::object()), ccgm::UsageError);
}

TEST_CASE("mask nets evaluate on the tape like in plain code") {
  std::mt19937_64 rng(4);
  auto masks = random_masks(3, 12);
  ccgm::diff::Tape t;
  auto v = t.input("v", 5, 3);
  auto nodes = add_mask_inputs(t, "m", masks[1]);
  auto out = mask_forward(t, nodes, v, t.constant(Matrix(5, 1, 1.0)), t.constant(Matrix(3, 1, 1.0)));
  Matrix vv(5, 3);
  std::normal_distribution<double> n;
  for (double& x : vv.values()) x = n(rng);
  t.bind("v", vv);
  const Matrix& res = t.forward(out);
  for (std::size_t r = 0; r < 5; ++r) CHECK(res(r, 0) == doctest::Approx(masks[1](vv.row_span(r))).epsilon(1e-13));
  auto loss = t.sum(t.square(out));
  t.forward(loss);
  CHECK(ccgm::diff::grad_check_input(t, loss, "m.W1", masks[1].w1, 1e-6).ok(1e-6));
  CHECK(ccgm::diff::grad_check_input(t, loss, "m.b1", masks[1].b1, 1e-6).ok(1e-6));
  auto j = mask_to_json(masks[2]);
  CHECK(mask_from_json(nlohmann::json::parse(j.dump())) == masks[2]);
}
