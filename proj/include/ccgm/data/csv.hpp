#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "ccgm/data/table.hpp"

namespace ccgm::data {

using RoleMap = std::map<std::string, ColumnRole, std::less<>>;

// Header row plus numeric cells. Columns absent from `roles` get role "other".
// Errors name the 1-based data row and the column.
DataTable parse_csv(std::string_view text, std::string_view source = "<memory>", const RoleMap& roles = {});
std::string format_csv(const DataTable& table);

// Missing or malformed files raise IoError.
DataTable read_csv(const std::filesystem::path& path, const RoleMap& roles = {});
void write_csv(const DataTable& table, const std::filesystem::path& path);

// 17 significant digits; parses back to the same double.
std::string format_double(double v);
// Strict: the whole of `text` must be a finite number.
bool parse_double(std::string_view text, double& out);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

std::filesystem::path schema_path(const std::filesystem::path& csv);
void write_schema(const TableSchema& schema, const std::filesystem::path& csv);
// Returns false when no sidecar exists next to `csv`.
bool read_schema(const std::filesystem::path& csv, TableSchema& out);

}  // namespace ccgm::data
