#pragma once
// Small parsers for command-line values and the resolved-config sidecar that
// every command writes next to its outputs.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ccgm/scm/causal_layer.hpp"

namespace ccgm::cli {

// "a:b:k": k evenly spaced points from a to b. a > b is rejected, as is a
// degenerate range with k > 1.
struct GridSpec {
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};
GridSpec parse_grid(std::string_view text, std::string_view what);
std::string format_grid(const GridSpec& g);

// "parent:child"
std::pair<std::string, std::string> parse_edge(std::string_view text);
// "concept=value"
std::pair<std::string, double> parse_clamp(std::string_view text);
// Comma-separated, blanks dropped.
std::vector<std::string> split_list(std::string_view text);

// Removals and clamps from repeated --remove / --do values. Empty entries
// (how an unset list reads back from a config file) are ignored.
scm::InterventionSpec parse_intervention(const std::vector<std::string>& removals,
                                         const std::vector<std::string>& clamps);

// Default seed: CCGM_SEED when set and numeric, else 0.
std::uint64_t default_seed();

// Resolved config of a run whose main output is a file: "<stem>.run.cfg".
// For a directory output: "<dir>/run.cfg".
std::filesystem::path config_path_for_file(const std::filesystem::path& out);
std::filesystem::path config_path_for_dir(const std::filesystem::path& dir);

}  // namespace ccgm::cli
