#include "ccgm/data/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ccgm/error.hpp"

namespace ccgm::data {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

bool parse_double(std::string_view text, double& out) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return false;
  auto res = std::from_chars(text.data(), text.data() + text.size(), out);
  return res.ec == std::errc() && res.ptr == text.data() + text.size() && std::isfinite(out);
}

DataTable parse_csv(std::string_view text, std::string_view source, const RoleMap& roles) {
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto pos = text.find('\n', start);
    if (pos == std::string_view::npos) pos = text.size();
    lines.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw UsageError(std::string(source) + ": missing header row");

  std::vector<std::string> names;
  std::vector<ColumnRole> col_roles;
  for (auto cell : split(lines.front())) {
    std::string name(cell);
    if (name.size() >= 2 && name.front() == '"' && name.back() == '"') name = name.substr(1, name.size() - 2);
    auto it = roles.find(name);
    col_roles.push_back(it == roles.end() ? ColumnRole::Other : it->second);
    names.push_back(std::move(name));
  }
  DataTable table(names, col_roles);
  for (const auto& [name, role] : roles) {
    if (!table.has_column(name)) throw UsageError(std::string(source) + ": role given for missing column '" + name + "'");
  }
  table.reserve_rows(lines.size() - 1);
  std::vector<double> row(names.size());
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const std::size_t data_row = li;  // 1-based among data rows
    if (trim(lines[li]).empty()) throw UsageError(std::string(source) + ": row " + std::to_string(data_row) + " is empty");
    auto cells = split(lines[li]);
    if (cells.size() != names.size()) {
      throw UsageError(std::string(source) + ": row " + std::to_string(data_row) + " has " +
                       std::to_string(cells.size()) + " cells, header has " + std::to_string(names.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_double(cells[c], row[c])) {
        throw UsageError(std::string(source) + ": row " + std::to_string(data_row) + ", column " +
                         std::to_string(c + 1) + " ('" + names[c] + "'): not a finite number: '" +
                         std::string(cells[c]) + "'");
      }
    }
    table.add_row(row);
  }
  return table;
}

std::string format_csv(const DataTable& table) {
  std::string out;
  for (std::size_t c = 0; c < table.cols(); ++c) {
    if (c) out += ',';
    out += table.column_name(c);
  }
  out += '\n';
  for (std::size_t r = 0; r < table.rows(); ++r) {
    for (std::size_t c = 0; c < table.cols(); ++c) {
      if (c) out += ',';
      out += format_double(table.at(r, c));
    }
    out += '\n';
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error while reading '" + path.string() + "'");
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw IoError("error while writing '" + path.string() + "'");
}

DataTable read_csv(const std::filesystem::path& path, const RoleMap& roles) {
  // A malformed file is an input failure (exit 3); a bad role map is still a
  // usage error.
  DataTable t;
  try {
    t = parse_csv(read_text_file(path), path.string());
  } catch (const UsageError& e) {
    throw IoError(e.what());
  }
  for (const auto& [name, role] : roles) {
    if (!t.has_column(name)) throw UsageError(path.string() + ": role given for missing column '" + name + "'");
    t.set_role(t.column_index(name), role);
  }
  t.set_provenance("file:" + path.string());
  return t;
}

void write_csv(const DataTable& table, const std::filesystem::path& path) {
  write_text_file(path, format_csv(table));
}

std::filesystem::path schema_path(const std::filesystem::path& csv) {
  return std::filesystem::path(csv.string() + ".roles.json");
}

void write_schema(const TableSchema& schema, const std::filesystem::path& csv) {
  write_text_file(schema_path(csv), schema_to_json(schema).dump(2) + "\n");
}

bool read_schema(const std::filesystem::path& csv, TableSchema& out) {
  const auto p = schema_path(csv);
  if (!std::filesystem::exists(p)) return false;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(p));
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError(p.string() + ": " + e.what());
  }
  out = schema_from_json(j);
  return true;
}

}  // namespace ccgm::data
