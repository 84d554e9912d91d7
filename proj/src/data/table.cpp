#include "ccgm/data/table.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ccgm/error.hpp"

namespace ccgm::data {

namespace {

constexpr std::pair<ColumnRole, std::string_view> kRoleNames[] = {
    {ColumnRole::Concept, "concept"},       {ColumnRole::Treatment, "treatment"}, {ColumnRole::Outcome, "outcome"},
    {ColumnRole::Confounder, "confounder"}, {ColumnRole::Other, "other"},
};

}  // namespace

std::string_view role_name(ColumnRole role) {
  for (const auto& [r, n] : kRoleNames)
    if (r == role) return n;
  return "other";
}

ColumnRole parse_role(std::string_view name) {
  for (const auto& [r, n] : kRoleNames)
    if (n == name) return r;
  throw UsageError("unknown column role '" + std::string(name) +
                   "' (expected concept, treatment, outcome, confounder or other)");
}

DataTable::DataTable(std::vector<std::string> columns, std::vector<ColumnRole> roles)
    : columns_(std::move(columns)), roles_(std::move(roles)) {
  if (roles_.empty()) roles_.assign(columns_.size(), ColumnRole::Other);
  if (roles_.size() != columns_.size()) {
    throw UsageError("table: " + std::to_string(columns_.size()) + " columns but " +
                     std::to_string(roles_.size()) + " roles");
  }
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].empty()) throw UsageError("table: column " + std::to_string(i + 1) + " has an empty name");
    for (std::size_t j = 0; j < i; ++j)
      if (columns_[i] == columns_[j]) throw UsageError("table: duplicate column '" + columns_[i] + "'");
  }
}

bool DataTable::has_column(std::string_view name) const {
  return std::find(columns_.begin(), columns_.end(), name) != columns_.end();
}

std::size_t DataTable::column_index(std::string_view name) const {
  auto it = std::find(columns_.begin(), columns_.end(), name);
  if (it == columns_.end()) throw UsageError("table has no column '" + std::string(name) + "'");
  return static_cast<std::size_t>(it - columns_.begin());
}

std::vector<std::size_t> DataTable::columns_with_role(ColumnRole role) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < roles_.size(); ++i)
    if (roles_[i] == role) out.push_back(i);
  return out;
}

std::size_t DataTable::role_column(ColumnRole role) const {
  auto cols = columns_with_role(role);
  if (cols.size() != 1) {
    throw UsageError("table needs exactly one " + std::string(role_name(role)) + " column, found " +
                     std::to_string(cols.size()));
  }
  return cols.front();
}

void DataTable::add_row(std::span<const double> values) {
  if (values.size() != cols()) {
    throw UsageError("table: row " + std::to_string(rows() + 1) + " has " + std::to_string(values.size()) +
                     " values, expected " + std::to_string(cols()));
  }
  data_.insert(data_.end(), values.begin(), values.end());
}

std::vector<double> DataTable::column(std::size_t c) const {
  if (c >= cols()) throw UsageError("table: column index " + std::to_string(c) + " out of range");
  std::vector<double> out(rows());
  for (std::size_t r = 0; r < rows(); ++r) out[r] = at(r, c);
  return out;
}

Matrix DataTable::select(std::span<const std::size_t> columns) const {
  Matrix m(rows(), columns.size());
  for (std::size_t j = 0; j < columns.size(); ++j) {
    if (columns[j] >= cols()) throw UsageError("table: column index out of range");
    for (std::size_t r = 0; r < rows(); ++r) m(r, j) = at(r, columns[j]);
  }
  return m;
}

Matrix DataTable::to_matrix() const {
  std::vector<std::size_t> all(cols());
  std::iota(all.begin(), all.end(), 0);
  return select(all);
}

DataTable DataTable::from_matrix(const Matrix& m, std::vector<std::string> columns, std::vector<ColumnRole> roles) {
  DataTable t(std::move(columns), std::move(roles));
  if (m.cols() != t.cols()) {
    throw UsageError("table: matrix has " + std::to_string(m.cols()) + " columns, expected " +
                     std::to_string(t.cols()));
  }
  t.data_.assign(m.values().begin(), m.values().end());
  return t;
}

double mean(std::span<const double> x) {
  if (x.empty()) throw UsageError("mean of an empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double stddev(std::span<const double> x) {
  if (x.size() < 2) throw UsageError("standard deviation needs at least two values");
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw UsageError("pearson: need two samples of equal length >= 2");
  const double mx = mean(x), my = mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

Matrix correlation_matrix(const DataTable& t) {
  const std::size_t k = t.cols();
  std::vector<std::vector<double>> cols(k);
  for (std::size_t c = 0; c < k; ++c) cols[c] = t.column(c);
  Matrix r = Matrix::identity(k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j) r(i, j) = r(j, i) = pearson(cols[i], cols[j]);
  return r;
}

nlohmann::json schema_to_json(const TableSchema& s) {
  nlohmann::json j;
  j["columns"] = s.columns;
  std::vector<std::string> roles;
  for (auto r : s.roles) roles.emplace_back(role_name(r));
  j["roles"] = roles;
  if (!s.exogenous.empty()) j["exogenous"] = std::vector<bool>(s.exogenous);
  if (!s.ranges.empty()) {
    nlohmann::json rs = nlohmann::json::array();
    for (const auto& r : s.ranges) rs.push_back({r.min, r.max});
    j["ranges"] = rs;
  }
  j["provenance"] = s.provenance;
  return j;
}

TableSchema schema_from_json(const nlohmann::json& j) {
  try {
    TableSchema s;
    s.columns = j.at("columns").get<std::vector<std::string>>();
    for (const auto& r : j.at("roles")) s.roles.push_back(parse_role(r.get<std::string>()));
    if (s.roles.size() != s.columns.size()) throw UsageError("schema: roles and columns differ in length");
    if (j.contains("exogenous")) s.exogenous = j.at("exogenous").get<std::vector<bool>>();
    if (!s.exogenous.empty() && s.exogenous.size() != s.columns.size()) {
      throw UsageError("schema: exogenous flags and columns differ in length");
    }
    if (j.contains("ranges")) {
      for (const auto& r : j.at("ranges")) s.ranges.push_back({r.at(0).get<double>(), r.at(1).get<double>()});
      if (s.ranges.size() != s.columns.size()) throw UsageError("schema: ranges and columns differ in length");
    }
    s.provenance = j.value("provenance", "");
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("schema: ") + e.what());
  }
}

scm::ConceptRange observed_range(const DataTable& t, std::size_t column) {
  if (t.rows() == 0) throw UsageError("cannot take the range of an empty column");
  auto v = t.column(column);
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  if (!(*lo < *hi)) throw UsageError("column '" + t.column_name(column) + "' is constant (min = max)");
  return {*lo, *hi};
}

scm::ConceptRegistry make_registry(const DataTable& t, const std::vector<bool>& exogenous,
                                   const std::vector<scm::ConceptRange>& ranges) {
  std::vector<scm::ConceptRange> rs = ranges;
  if (rs.empty())
    for (std::size_t c = 0; c < t.cols(); ++c) rs.push_back(observed_range(t, c));
  return scm::ConceptRegistry(t.column_names(), exogenous, rs);
}

}  // namespace ccgm::data
