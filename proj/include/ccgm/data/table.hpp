#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ccgm/diff/matrix.hpp"
#include "ccgm/scm/adjacency.hpp"

namespace ccgm::data {

using diff::Matrix;

enum class ColumnRole { Concept, Treatment, Outcome, Confounder, Other };

std::string_view role_name(ColumnRole role);
// Throws UsageError for anything but the five role names.
ColumnRole parse_role(std::string_view name);

// Rectangular numeric table with named, role-tagged columns.
class DataTable {
 public:
  DataTable() = default;
  explicit DataTable(std::vector<std::string> columns, std::vector<ColumnRole> roles = {});

  std::size_t rows() const noexcept { return cols() == 0 ? 0 : data_.size() / cols(); }
  std::size_t cols() const noexcept { return columns_.size(); }
  const std::vector<std::string>& column_names() const noexcept { return columns_; }
  const std::string& column_name(std::size_t c) const { return columns_.at(c); }
  ColumnRole role(std::size_t c) const { return roles_.at(c); }
  const std::vector<ColumnRole>& roles() const noexcept { return roles_; }
  void set_role(std::size_t c, ColumnRole role) { roles_.at(c) = role; }

  bool has_column(std::string_view name) const;
  std::size_t column_index(std::string_view name) const;
  // The single column carrying `role`; UsageError if there are zero or several.
  std::size_t role_column(ColumnRole role) const;
  std::vector<std::size_t> columns_with_role(ColumnRole role) const;

  void reserve_rows(std::size_t n) { data_.reserve(n * cols()); }
  void add_row(std::span<const double> values);

  double at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }
  double& at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols(), cols()}; }
  std::vector<double> column(std::size_t c) const;
  std::vector<double> column(std::string_view name) const { return column(column_index(name)); }

  // Rows x cols copy of the selected columns, in the given order.
  Matrix select(std::span<const std::size_t> columns) const;
  Matrix to_matrix() const;
  static DataTable from_matrix(const Matrix& m, std::vector<std::string> columns,
                               std::vector<ColumnRole> roles = {});

  const std::string& provenance() const noexcept { return provenance_; }
  void set_provenance(std::string p) { provenance_ = std::move(p); }

  friend bool operator==(const DataTable& a, const DataTable& b) {
    return a.columns_ == b.columns_ && a.roles_ == b.roles_ && a.data_ == b.data_;
  }

 private:
  std::vector<std::string> columns_;
  std::vector<ColumnRole> roles_;
  std::vector<double> data_;
  std::string provenance_;
};

double mean(std::span<const double> x);
// Sample (n - 1) standard deviation.
double stddev(std::span<const double> x);
double pearson(std::span<const double> x, std::span<const double> y);
Matrix correlation_matrix(const DataTable& t);

// Sidecar schema stored next to a CSV as <csv>.roles.json.
struct TableSchema {
  std::vector<std::string> columns;
  std::vector<ColumnRole> roles;
  std::vector<bool> exogenous;                    // empty when unknown
  std::vector<scm::ConceptRange> ranges;          // empty when unknown
  std::string provenance;
};

nlohmann::json schema_to_json(const TableSchema& s);
TableSchema schema_from_json(const nlohmann::json& j);

// Observed [min, max] of a column; UsageError if the column is constant.
scm::ConceptRange observed_range(const DataTable& t, std::size_t column);

// Registry over every column of `t`. Ranges come from `ranges` when given,
// otherwise from the observed data.
scm::ConceptRegistry make_registry(const DataTable& t, const std::vector<bool>& exogenous,
                                   const std::vector<scm::ConceptRange>& ranges = {});

}  // namespace ccgm::data
