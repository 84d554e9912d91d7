#include "ccgm/data/pendulum.hpp"

#include <cmath>
#include <random>

#include "ccgm/error.hpp"

namespace ccgm::data {

namespace {

using C = PendulumConstants;

void check_scene_inputs(double theta, double x_sun) {
  constexpr double slack = 1e-12;
  if (!std::isfinite(theta) || std::abs(theta) > C::theta_max + slack) {
    throw UsageError("pendulum: theta " + std::to_string(theta) + " outside [-pi/4, pi/4]");
  }
  if (!std::isfinite(x_sun) || std::abs(x_sun) > C::sun_max + slack) {
    throw UsageError("pendulum: x_sun " + std::to_string(x_sun) + " outside [-1, 1]");
  }
}

}  // namespace

double ground_projection(double px, double py, double sx) {
  const double rise = C::sun_height - py;
  if (!(rise > 0.0)) throw UsageError("pendulum: sun at or below the projected point");
  return px + (px - sx) * py / rise;
}

ShadowGeometry shadow_geometry(double theta, double x_sun) {
  check_scene_inputs(theta, x_sun);
  const double bob_x = C::rod_length * std::sin(theta);
  const double bob_y = C::pivot_height - C::rod_length * std::cos(theta);
  const double g0 = ground_projection(0.0, C::pivot_height, x_sun);
  const double g1 = ground_projection(bob_x, bob_y, x_sun);
  const double d = g1 - g0;
  return {std::sqrt(d * d + C::thickness * C::thickness), 0.5 * (g0 + g1)};
}

PendulumScene make_scene(double theta, double x_sun) {
  auto g = shadow_geometry(theta, x_sun);
  return {theta, x_sun, g.w_shadow, g.x_shadow};
}

double Axis::value(std::size_t i) const {
  if (count <= 1) return min;
  return min + (max - min) * static_cast<double>(i) / static_cast<double>(count - 1);
}

const std::vector<std::string>& pendulum_columns() {
  static const std::vector<std::string> names = {"theta", "x_sun", "w_shadow", "x_shadow"};
  return names;
}

const std::vector<bool>& pendulum_exogenous() {
  static const std::vector<bool> flags = {true, true, false, false};
  return flags;
}

DataTable generate_pendulum(const PendulumGrid& grid, std::uint64_t seed) {
  if (grid.theta.count == 0 || grid.x_sun.count == 0) throw UsageError("pendulum: empty grid");
  if (grid.theta.min > grid.theta.max || grid.x_sun.min > grid.x_sun.max) {
    throw UsageError("pendulum: grid axis with min > max");
  }
  check_scene_inputs(grid.theta.min, grid.x_sun.min);
  check_scene_inputs(grid.theta.max, grid.x_sun.max);
  DataTable t(pendulum_columns(), std::vector<ColumnRole>(4, ColumnRole::Concept));
  t.reserve_rows(grid.theta.count * grid.x_sun.count);
  for (std::size_t i = 0; i < grid.theta.count; ++i) {
    for (std::size_t j = 0; j < grid.x_sun.count; ++j) {
      const auto s = make_scene(grid.theta.value(i), grid.x_sun.value(j));
      const double row[] = {s.theta, s.x_sun, s.w_shadow, s.x_shadow};
      t.add_row(row);
    }
  }
  t.set_provenance("pendulum grid " + std::to_string(grid.theta.count) + "x" + std::to_string(grid.x_sun.count) +
                   ", seed " + std::to_string(seed));
  return t;
}

DataTable sample_pendulum(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> th(-C::theta_max, C::theta_max);
  std::uniform_real_distribution<double> sun(-C::sun_max, C::sun_max);
  DataTable t(pendulum_columns(), std::vector<ColumnRole>(4, ColumnRole::Concept));
  t.reserve_rows(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double a = th(rng);
    const double b = sun(rng);
    const auto s = make_scene(a, b);
    const double row[] = {s.theta, s.x_sun, s.w_shadow, s.x_shadow};
    t.add_row(row);
  }
  t.set_provenance("pendulum random sample n=" + std::to_string(count) + ", seed " + std::to_string(seed));
  return t;
}

}  // namespace ccgm::data
