#pragma once

#include <string>
#include <string_view>

#include "ccgm/data/pendulum.hpp"

namespace ccgm::data {

// Static SVG 1.1 drawing in scene coordinates (y up, ground at y = 0). The
// output depends only on the scene, so equal scenes give byte-equal files.
// The shadow is the element with id="shadow".
std::string render_svg(const PendulumScene& scene);

struct ShadowSegment {
  double x0 = 0.0;
  double x1 = 0.0;
};

// Reads the shadow endpoints back out of a document produced by render_svg.
ShadowSegment parse_shadow_segment(std::string_view svg);

}  // namespace ccgm::data
