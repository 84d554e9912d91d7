#pragma once
// Point-light pendulum scene. Pivot at (0, pivot_height), rod of rod_length,
// sun at (x_sun, sun_height); both rod endpoints are cast onto the ground
// y = 0 along rays from the sun.

#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "ccgm/data/table.hpp"
#include "ccgm/scm/adjacency.hpp"

namespace ccgm::data {

struct PendulumConstants {
  static constexpr double pivot_height = 1.0;
  static constexpr double rod_length = 0.5;
  static constexpr double sun_height = 2.0;
  // Rod thickness: keeps the width smooth and positive when the shadow of
  // the rod degenerates to a point.
  static constexpr double thickness = 0.05;
  static constexpr double theta_max = std::numbers::pi / 4;
  static constexpr double sun_max = 1.0;
};

struct ShadowGeometry {
  double w_shadow = 0.0;
  double x_shadow = 0.0;
};

struct PendulumScene {
  double theta = 0.0;
  double x_sun = 0.0;
  double w_shadow = 0.0;
  double x_shadow = 0.0;
};

// Ground x of point (px, py) seen from the sun at (sx, sun_height).
double ground_projection(double px, double py, double sx);

// Throws UsageError outside theta in [-pi/4, pi/4], x_sun in [-1, 1].
ShadowGeometry shadow_geometry(double theta, double x_sun);
PendulumScene make_scene(double theta, double x_sun);

struct Axis {
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
  double value(std::size_t i) const;
};

struct PendulumGrid {
  Axis theta{-PendulumConstants::theta_max, PendulumConstants::theta_max, 40};
  Axis x_sun{-PendulumConstants::sun_max, PendulumConstants::sun_max, 40};
};

const std::vector<std::string>& pendulum_columns();
const std::vector<bool>& pendulum_exogenous();

// Cartesian sweep, theta-major. The seed is recorded in the provenance only:
// the grid itself is deterministic.
DataTable generate_pendulum(const PendulumGrid& grid, std::uint64_t seed = 0);
// Uniform random in-range scenes (held-out evaluation data).
DataTable sample_pendulum(std::size_t count, std::uint64_t seed);

}  // namespace ccgm::data
