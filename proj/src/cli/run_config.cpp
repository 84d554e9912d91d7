#include "ccgm/cli/run_config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>

#include "ccgm/data/csv.hpp"
#include "ccgm/error.hpp"

namespace ccgm::cli {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

double number(std::string_view text, std::string_view what) {
  double v = 0.0;
  if (!data::parse_double(trim(text), v)) throw UsageError(std::string(what) + ": '" + std::string(text) + "' is not a number");
  return v;
}

}  // namespace

GridSpec parse_grid(std::string_view text, std::string_view what) {
  const auto c1 = text.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : text.find(':', c1 + 1);
  if (c2 == std::string_view::npos || text.find(':', c2 + 1) != std::string_view::npos) {
    throw UsageError(std::string(what) + ": expected a:b:k, got '" + std::string(text) + "'");
  }
  GridSpec g;
  g.min = number(text.substr(0, c1), what);
  g.max = number(text.substr(c1 + 1, c2 - c1 - 1), what);
  const auto k = trim(text.substr(c2 + 1));
  const auto [p, ec] = std::from_chars(k.data(), k.data() + k.size(), g.count);
  if (ec != std::errc() || p != k.data() + k.size() || g.count == 0) {
    throw UsageError(std::string(what) + ": point count must be a positive integer, got '" + std::string(k) + "'");
  }
  if (g.min > g.max) throw UsageError(std::string(what) + ": reversed range " + std::string(text) + " (need a <= b)");
  if (g.min == g.max && g.count > 1) throw UsageError(std::string(what) + ": empty range with several points");
  return g;
}

std::string format_grid(const GridSpec& g) {
  return data::format_double(g.min) + ":" + data::format_double(g.max) + ":" + std::to_string(g.count);
}

std::pair<std::string, std::string> parse_edge(std::string_view text) {
  const auto c = text.find(':');
  if (c == std::string_view::npos || text.find(':', c + 1) != std::string_view::npos) {
    throw UsageError("edge must be parent:child, got '" + std::string(text) + "'");
  }
  std::string parent(trim(text.substr(0, c))), child(trim(text.substr(c + 1)));
  if (parent.empty() || child.empty()) throw UsageError("edge must be parent:child, got '" + std::string(text) + "'");
  return {parent, child};
}

std::pair<std::string, double> parse_clamp(std::string_view text) {
  const auto e = text.find('=');
  if (e == std::string_view::npos) throw UsageError("intervention must be concept=value, got '" + std::string(text) + "'");
  std::string name(trim(text.substr(0, e)));
  if (name.empty()) throw UsageError("intervention must be concept=value, got '" + std::string(text) + "'");
  return {name, number(text.substr(e + 1), "intervention value for " + name)};
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    auto item = trim(text.substr(start, end - start));
    if (!item.empty()) out.emplace_back(item);
    start = end + 1;
  }
  return out;
}

scm::InterventionSpec parse_intervention(const std::vector<std::string>& removals, const std::vector<std::string>& clamps) {
  scm::InterventionSpec spec;
  for (const auto& r : removals)
    if (!trim(r).empty()) spec.edge_removals.push_back(parse_edge(r));
  for (const auto& c : clamps)
    if (!trim(c).empty()) spec.clamps.push_back(parse_clamp(c));
  return spec;
}

std::uint64_t default_seed() {
  const char* env = std::getenv("CCGM_SEED");
  if (!env) return 0;
  std::uint64_t v = 0;
  const std::string_view s(env);
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw UsageError("CCGM_SEED must be a non-negative integer");
  return v;
}

std::filesystem::path config_path_for_file(const std::filesystem::path& out) {
  auto p = out;
  return p.replace_extension(".run.cfg");
}

std::filesystem::path config_path_for_dir(const std::filesystem::path& dir) { return dir / "run.cfg"; }

}  // namespace ccgm::cli
