#include "autog/value.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <stdexcept>

#include "autog/util.hpp"

namespace autog {

bool is_null(const Scalar& value) { return std::holds_alternative<std::monostate>(value); }

bool is_null(const Cell& value) { return std::holds_alternative<std::monostate>(value); }

bool is_list(const Cell& value) { return std::holds_alternative<std::vector<Scalar>>(value); }

bool is_tensor(const Cell& value) { return std::holds_alternative<std::vector<double>>(value); }

Scalar cell_to_scalar(const Cell& value) {
  if (is_list(value) || is_tensor(value)) {
    throw std::logic_error("cell_to_scalar: cell is not scalar");
  }
  if (is_null(value)) return Scalar{};
  if (const auto* i = std::get_if<std::int64_t>(&value)) return *i;
  if (const auto* d = std::get_if<double>(&value)) return *d;
  return std::get<std::string>(value);
}

Cell scalar_to_cell(const Scalar& value) {
  if (is_null(value)) return Cell{};
  if (const auto* i = std::get_if<std::int64_t>(&value)) return *i;
  if (const auto* d = std::get_if<double>(&value)) return *d;
  return std::get<std::string>(value);
}

std::string scalar_to_string(const Scalar& value) {
  if (is_null(value)) return "nan";
  if (const auto* i = std::get_if<std::int64_t>(&value)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&value)) {
    if (std::floor(*d) == *d && std::abs(*d) < 1e15) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.1f", *d);
      return buf;
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", *d);
    return buf;
  }
  return std::get<std::string>(value);
}

std::string cell_to_string(const Cell& value) {
  if (is_list(value)) {
    const auto& items = std::get<std::vector<Scalar>>(value);
    std::string out = "[";
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) out += ", ";
      out += scalar_to_string(items[i]);
    }
    return out + "]";
  }
  if (is_tensor(value)) {
    return "<tensor:" + std::to_string(std::get<std::vector<double>>(value).size()) + ">";
  }
  return scalar_to_string(cell_to_scalar(value));
}

std::optional<double> scalar_as_number(const Scalar& value) {
  if (const auto* i = std::get_if<std::int64_t>(&value)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&value)) return *d;
  return std::nullopt;
}

bool scalar_less(const Scalar& a, const Scalar& b) {
  const auto na = scalar_as_number(a);
  const auto nb = scalar_as_number(b);
  if (na && nb) return *na < *nb;
  if (na) return true;  // numbers order before strings
  if (nb) return false;
  if (is_null(a)) return !is_null(b);
  if (is_null(b)) return false;
  return std::get<std::string>(a) < std::get<std::string>(b);
}

bool scalar_eq(const Scalar& a, const Scalar& b) {
  if (is_null(a) || is_null(b)) return is_null(a) && is_null(b);
  const auto na = scalar_as_number(a);
  const auto nb = scalar_as_number(b);
  if (na && nb) return *na == *nb;
  if (static_cast<bool>(na) != static_cast<bool>(nb)) return false;
  return std::get<std::string>(a) == std::get<std::string>(b);
}

std::size_t ScalarHash::operator()(const Scalar& value) const {
  if (is_null(value)) return 0;
  if (const auto n = scalar_as_number(value)) {
    if (*n == std::floor(*n) && std::abs(*n) < 9e15) {
      return std::hash<std::int64_t>{}(static_cast<std::int64_t>(*n));
    }
    return std::hash<double>{}(*n);
  }
  return std::hash<std::string>{}(std::get<std::string>(value));
}

bool Column::has_lists() const {
  for (const auto& cell : cells) {
    if (is_list(cell)) return true;
  }
  return false;
}

bool Column::has_tensors() const {
  for (const auto& cell : cells) {
    if (is_tensor(cell)) return true;
  }
  return false;
}

std::size_t Column::tensor_width() const {
  for (const auto& cell : cells) {
    if (is_tensor(cell)) return std::get<std::vector<double>>(cell).size();
  }
  return 0;
}

bool TableData::has_column(const std::string& name) const {
  for (const auto& n : order) {
    if (n == name) return true;
  }
  return false;
}

const Column& TableData::column(const std::string& name) const {
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i] == name) return columns[i];
  }
  throw std::out_of_range("no column '" + name + "' in table '" + table_name + "'");
}

Column& TableData::column(const std::string& name) {
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i] == name) return columns[i];
  }
  throw std::out_of_range("no column '" + name + "' in table '" + table_name + "'");
}

void TableData::add_column(const std::string& name, Column column) {
  if (has_column(name)) {
    throw std::logic_error("duplicate column '" + name + "' in table '" + table_name + "'");
  }
  order.push_back(name);
  columns.push_back(std::move(column));
}

void TableData::drop_column(const std::string& name) {
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i] == name) {
      order.erase(order.begin() + static_cast<std::ptrdiff_t>(i));
      columns.erase(columns.begin() + static_cast<std::ptrdiff_t>(i));
      return;
    }
  }
  throw std::out_of_range("no column '" + name + "' in table '" + table_name + "'");
}

}  // namespace autog
