#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace autog {

/// Scalar cell value. monostate marks a missing value (NaN/null).
using Scalar = std::variant<std::monostate, std::int64_t, double, std::string>;

/// One table cell: a scalar, a list of scalars (multi-category), or a
/// fixed-width numeric vector (embedding).
using Cell = std::variant<std::monostate, std::int64_t, double, std::string,
                          std::vector<Scalar>, std::vector<double>>;

bool is_null(const Scalar& value);
bool is_null(const Cell& value);
bool is_list(const Cell& value);
bool is_tensor(const Cell& value);

Scalar cell_to_scalar(const Cell& value);  // throws for list/tensor cells
Cell scalar_to_cell(const Scalar& value);

/// Rendering used by stats reports and key-space decode logs: integers plain,
/// reals shortest round-trip, strings as-is.
std::string scalar_to_string(const Scalar& value);
std::string cell_to_string(const Cell& value);

/// Numeric view for min/max; strings are not orderable through this.
std::optional<double> scalar_as_number(const Scalar& value);

bool scalar_less(const Scalar& a, const Scalar& b);
bool scalar_eq(const Scalar& a, const Scalar& b);

struct ScalarHash {
  std::size_t operator()(const Scalar& value) const;
};
struct ScalarEq {
  bool operator()(const Scalar& a, const Scalar& b) const { return scalar_eq(a, b); }
};

struct Column {
  std::vector<Cell> cells;

  std::size_t size() const { return cells.size(); }
  bool has_lists() const;
  bool has_tensors() const;
  /// Width of the first tensor cell, 0 if none.
  std::size_t tensor_width() const;
};

/// In-memory payload of one table: ordered columns of equal length.
struct TableData {
  std::string table_name;
  std::vector<std::string> order;                 // column names, file order
  std::vector<Column> columns;                    // parallel to `order`
  std::size_t row_count = 0;

  bool has_column(const std::string& name) const;
  const Column& column(const std::string& name) const;
  Column& column(const std::string& name);
  void add_column(const std::string& name, Column column);
  void drop_column(const std::string& name);
};

}  // namespace autog
