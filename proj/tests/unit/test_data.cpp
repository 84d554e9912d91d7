#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "ccgm/data/copula.hpp"
#include "ccgm/data/csv.hpp"
#include "ccgm/data/normalize.hpp"
#include "ccgm/data/pendulum.hpp"
#include "ccgm/data/svg.hpp"
#include "ccgm/data/table.hpp"
#include "ccgm/error.hpp"

using namespace ccgm::data;

TEST_CASE("shadow geometry matches the ray-cast reference") {
  // Frozen from an independent ray/ground-plane intersection script.
  auto g = shadow_geometry(0.3, 0.5);
  CHECK(g.w_shadow == doctest::Approx(0.525632504809201).epsilon(1e-13));
  CHECK(g.x_shadow == doctest::Approx(-0.23837549325799262).epsilon(1e-13));
}

TEST_CASE("shadow geometry symmetry and degenerate cases") {
  auto overhead = shadow_geometry(0.0, 0.0);
  CHECK(overhead.x_shadow == doctest::Approx(0.0));
  CHECK(overhead.w_shadow == doctest::Approx(PendulumConstants::thickness));
  for (double th : {-0.7, -0.2, 0.1, 0.5})
    for (double s : {-0.9, -0.3, 0.0, 0.6}) {
      auto a = shadow_geometry(th, s);
      auto b = shadow_geometry(-th, -s);
      CHECK(a.w_shadow == doctest::Approx(b.w_shadow).epsilon(1e-14));
      CHECK(a.x_shadow == doctest::Approx(-b.x_shadow).epsilon(1e-14));
      CHECK(a.w_shadow > 0.0);
    }
  CHECK_THROWS_AS(shadow_geometry(1.0, 0.0), ccgm::UsageError);
  CHECK_THROWS_AS(shadow_geometry(0.0, 1.5), ccgm::UsageError);
  CHECK_THROWS_AS(ground_projection(0.0, 2.5, 0.0), ccgm::UsageError);
}

TEST_CASE("pendulum grid") {
  PendulumGrid grid;
  grid.theta.count = 10;
  grid.x_sun.count = 10;
  auto t = generate_pendulum(grid, 1);
  CHECK(t.rows() == 100);
  CHECK(t.column_names() == pendulum_columns());
  for (std::size_t r = 0; r < t.rows(); ++r) {
    auto g = shadow_geometry(t.at(r, 0), t.at(r, 1));
    CHECK(std::abs(g.w_shadow - t.at(r, 2)) < 1e-12);
    CHECK(std::abs(g.x_shadow - t.at(r, 3)) < 1e-12);
  }
  CHECK(std::abs(pearson(t.column(0), t.column(3))) > 0.05);
  CHECK(generate_pendulum(grid, 1) == t);
  grid.x_sun.count = 0;
  CHECK_THROWS_AS(generate_pendulum(grid), ccgm::UsageError);
  auto h = sample_pendulum(50, 3);
  CHECK(h.rows() == 50);
  CHECK(sample_pendulum(50, 3) == h);
}

TEST_CASE("csv round trip is lossless") {
  DataTable t({"a", "b"}, {ColumnRole::Treatment, ColumnRole::Outcome});
  const double r1[] = {0.1 + 0.2, -1.0 / 3.0};
  const double r2[] = {1e-300, 123456789.123456789};
  t.add_row(r1);
  t.add_row(r2);
  auto back = parse_csv(format_csv(t), "mem", {{"a", ColumnRole::Treatment}, {"b", ColumnRole::Outcome}});
  CHECK(back == t);

  auto dir = std::filesystem::temp_directory_path() / "ccgm_csv_test";
  write_csv(t, dir / "t.csv");
  CHECK(read_csv(dir / "t.csv").to_matrix() == t.to_matrix());
  CHECK(read_csv(dir / "t.csv").role(0) == ColumnRole::Other);
  std::filesystem::remove_all(dir);
}

TEST_CASE("csv edge cases and errors") {
  auto empty = parse_csv("x,y\n");
  CHECK(empty.rows() == 0);
  CHECK(empty.cols() == 2);
  std::string ragged = "x,y\n";
  for (int i = 1; i <= 6; ++i) ragged += "1,2\n";
  ragged += "1,2,3\n";
  try {
    parse_csv(ragged, "f.csv");
    FAIL("expected an error");
  } catch (const ccgm::UsageError& e) {
    CHECK(std::string(e.what()).find("row 7") != std::string::npos);
  }
  try {
    parse_csv("x,y\n1,abc\n", "f.csv");
    FAIL("expected an error");
  } catch (const ccgm::UsageError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("row 1") != std::string::npos);
    CHECK(msg.find("column 2") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_csv(""), ccgm::UsageError);
  CHECK_THROWS_AS(parse_csv("x,x\n1,2\n"), ccgm::UsageError);
  CHECK_THROWS_AS(read_csv("/nonexistent/file.csv"), ccgm::IoError);
  CHECK(parse_csv("a\r\n1.5\r\n").at(0, 0) == 1.5);
}

TEST_CASE("schema sidecar round trip") {
  TableSchema s{{"a", "b"}, {ColumnRole::Confounder, ColumnRole::Outcome}, {true, false}, {{0, 1}, {-2, 2}}, "test"};
  auto back = schema_from_json(schema_to_json(s));
  CHECK(back.columns == s.columns);
  CHECK(back.roles == s.roles);
  CHECK(back.exogenous == s.exogenous);
  CHECK(back.ranges == s.ranges);
  CHECK(back.provenance == "test");
  CHECK_THROWS_AS(parse_role("bogus"), ccgm::UsageError);
}

TEST_CASE("normalization") {
  Normalizer n({{2.0, 6.0}, {-1.0, 1.0}});
  CHECK(n.forward(0, 2.0) == -1.0);
  CHECK(n.forward(0, 6.0) == 1.0);
  CHECK(n.forward(0, 4.0) == 0.0);
  for (double v : {2.0, 2.1, 3.7, 5.999, 6.0}) CHECK(std::abs(n.inverse(0, n.forward(0, v)) - v) <= 1e-12);
  std::size_t clipped = 0;
  auto m = n.forward_matrix(Matrix{{7.0, 0.0}, {3.0, -2.0}}, &clipped);
  CHECK(clipped == 2);
  CHECK(m(0, 0) == 1.0);
  CHECK(m(1, 1) == -1.0);
  CHECK_THROWS_AS(Normalizer({{1.0, 1.0}}), ccgm::UsageError);
  DataTable flat({"c"});
  const double one[] = {1.0};
  flat.add_row(one);
  flat.add_row(one);
  CHECK_THROWS_AS(observed_range(flat, 0), ccgm::UsageError);
}

TEST_CASE("copula reproduces the mindset correlations") {
  auto spec = mindset_spec(10391, 7);
  auto t = simulate_copula(spec);
  CHECK(t.rows() == 10391);
  auto r = correlation_matrix(t);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) CHECK(std::abs(r(i, j) - spec.correlation(i, j)) <= 0.03);
  CHECK(r(1, 3) == doctest::Approx(0.439).epsilon(0.03 / 0.439));
  for (double d : t.column("D")) CHECK((d >= 0.0 && d <= 1.0));
  CHECK(simulate_copula(spec) == t);
  CHECK(t.role(t.column_index("D")) == ColumnRole::Treatment);
}

TEST_CASE("copula accuracy over seeds and the identity target") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto spec = mindset_spec(500, seed);
    auto r = correlation_matrix(simulate_copula(spec));
    double worst = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = i + 1; j < 4; ++j) worst = std::max(worst, std::abs(r(i, j) - spec.correlation(i, j)));
    CHECK(worst <= 0.1);
  }
  auto spec = mindset_spec(10391, 3);
  spec.correlation = Matrix::identity(4);
  auto r = correlation_matrix(simulate_copula(spec));
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) CHECK(std::abs(r(i, j)) < 0.03);
}

TEST_CASE("correlation validation and repair") {
  CHECK_THROWS_AS(repair_correlation(Matrix{{1, 0.9, -0.9}, {0.9, 1, 0.9}, {-0.9, 0.9, 1}}), ccgm::UsageError);
  CHECK_THROWS_AS(repair_correlation(Matrix{{1, 0.2}, {0.3, 1}}), ccgm::UsageError);
  CHECK_THROWS_AS(repair_correlation(Matrix{{2, 0}, {0, 1}}), ccgm::UsageError);
  // Singular but PSD passes untouched; a tiny negative eigenvalue is repaired.
  Matrix singular{{1, 1}, {1, 1}};
  CHECK(repair_correlation(singular) == singular);
  Matrix nearly{{1, 1, 0.5 + 1e-7}, {1, 1, 0.5}, {0.5 + 1e-7, 0.5, 1}};
  auto fixed = repair_correlation(nearly);
  CHECK(fixed(0, 0) == doctest::Approx(1.0));
  CHECK(std::abs(fixed(0, 2) - nearly(0, 2)) < 1e-6);

  auto spec = mindset_spec(0, 1);
  CHECK_THROWS_AS(simulate_copula(spec), ccgm::UsageError);
  auto j = nlohmann::json::parse(R"({"variables":[{"name":"a","role":"treatment","marginal":"uniform"},
      {"name":"b","role":"outcome","mean":3,"std":2}],"correlation":[[1,0.5],[0.5,1]]})");
  auto user = copula_from_json(j, 4000, 9);
  auto t = simulate_copula(user);
  CHECK(pearson(t.column(0), t.column(1)) == doctest::Approx(0.5).epsilon(0.06));
  CHECK(mean(t.column(1)) == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("svg rendering") {
  auto scene = make_scene(0.3, -0.4);
  auto a = render_svg(scene);
  CHECK(a == render_svg(scene));
  auto seg = parse_shadow_segment(a);
  CHECK(seg.x0 == scene.x_shadow - 0.5 * scene.w_shadow);
  CHECK(seg.x1 == scene.x_shadow + 0.5 * scene.w_shadow);
  CHECK(a.find("<svg") != std::string::npos);
  PendulumScene bad = scene;
  bad.theta = 2.0;
  CHECK_THROWS_AS(render_svg(bad), ccgm::UsageError);
  CHECK_THROWS_AS(parse_shadow_segment("<svg></svg>"), ccgm::UsageError);
}

TEST_CASE("malformed CSV files are input errors naming the row") {
  const auto dir = std::filesystem::temp_directory_path() / "ccgm_unit_data";
  std::filesystem::create_directories(dir);
  write_text_file(dir / "bad.csv", "a,b\n1,2\n3,x\n");
  CHECK_THROWS_WITH_AS(read_csv(dir / "bad.csv"), doctest::Contains("row 2"), ccgm::IoError);
  write_text_file(dir / "ok.csv", "a,b\n1,2\n");
  CHECK_THROWS_AS(read_csv(dir / "ok.csv", {{"zz", ColumnRole::Outcome}}), ccgm::UsageError);
  CHECK(read_csv(dir / "ok.csv", {{"b", ColumnRole::Outcome}}).role(1) == ColumnRole::Outcome);
}
