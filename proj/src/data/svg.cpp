#include "ccgm/data/svg.hpp"

#include <cmath>

#include "ccgm/data/csv.hpp"
#include "ccgm/error.hpp"

namespace ccgm::data {

namespace {

using C = PendulumConstants;

std::string num(double v) { return format_double(v); }

double attribute(std::string_view element, std::string_view name) {
  const std::string key = " " + std::string(name) + "=\"";
  const auto pos = element.find(key);
  if (pos == std::string_view::npos) throw UsageError("svg: shadow element has no '" + std::string(name) + "'");
  const auto start = pos + key.size();
  const auto end = element.find('"', start);
  double v = 0.0;
  if (end == std::string_view::npos || !parse_double(element.substr(start, end - start), v)) {
    throw UsageError("svg: bad value for '" + std::string(name) + "'");
  }
  return v;
}

}  // namespace

std::string render_svg(const PendulumScene& s) {
  const double slack = 1e-12;
  if (!std::isfinite(s.theta) || std::abs(s.theta) > C::theta_max + slack || !std::isfinite(s.x_sun) ||
      std::abs(s.x_sun) > C::sun_max + slack) {
    throw UsageError("svg: scene outside theta in [-pi/4, pi/4], x_sun in [-1, 1]");
  }
  if (!std::isfinite(s.w_shadow) || !std::isfinite(s.x_shadow) || s.w_shadow < 0.0 ||
      std::abs(s.x_shadow) > 10.0 || s.w_shadow > 10.0) {
    throw UsageError("svg: shadow out of range (w_shadow " + num(s.w_shadow) + ", x_shadow " + num(s.x_shadow) + ")");
  }
  const double bob_x = C::rod_length * std::sin(s.theta);
  const double bob_y = C::pivot_height - C::rod_length * std::cos(s.theta);
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"480\" height=\"288\" "
         "viewBox=\"-2.5 -0.5 5 3\">\n";
  out += "<rect x=\"-2.5\" y=\"-0.5\" width=\"5\" height=\"3\" fill=\"#f4f1e8\"/>\n";
  // Flip y so the drawing below uses scene coordinates directly.
  out += "<g transform=\"matrix(1 0 0 -1 0 2)\">\n";
  out += "<line id=\"ground\" x1=\"-2.5\" y1=\"0\" x2=\"2.5\" y2=\"0\" stroke=\"#6b5b3e\" stroke-width=\"0.02\"/>\n";
  out += "<circle id=\"sun\" cx=\"" + num(s.x_sun) + "\" cy=\"" + num(C::sun_height) +
         "\" r=\"0.12\" fill=\"#f2b705\"/>\n";
  out += "<line id=\"shadow\" x1=\"" + num(s.x_shadow - 0.5 * s.w_shadow) + "\" y1=\"0\" x2=\"" +
         num(s.x_shadow + 0.5 * s.w_shadow) + "\" y2=\"0\" stroke=\"#333333\" stroke-width=\"0.06\"/>\n";
  out += "<line id=\"rod\" x1=\"0\" y1=\"" + num(C::pivot_height) + "\" x2=\"" + num(bob_x) + "\" y2=\"" +
         num(bob_y) + "\" stroke=\"#2e4a7d\" stroke-width=\"" + num(C::thickness) + "\"/>\n";
  out += "<circle id=\"pivot\" cx=\"0\" cy=\"" + num(C::pivot_height) + "\" r=\"0.03\" fill=\"#2e4a7d\"/>\n";
  out += "<circle id=\"bob\" cx=\"" + num(bob_x) + "\" cy=\"" + num(bob_y) + "\" r=\"0.06\" fill=\"#2e4a7d\"/>\n";
  out += "</g>\n</svg>\n";
  return out;
}

ShadowSegment parse_shadow_segment(std::string_view svg) {
  const auto pos = svg.find("id=\"shadow\"");
  if (pos == std::string_view::npos) throw UsageError("svg: no shadow element");
  const auto open = svg.rfind('<', pos);
  const auto close = svg.find('>', pos);
  if (open == std::string_view::npos || close == std::string_view::npos) throw UsageError("svg: malformed shadow element");
  const auto element = svg.substr(open, close - open);
  return {attribute(element, "x1"), attribute(element, "x2")};
}

}  // namespace ccgm::data
