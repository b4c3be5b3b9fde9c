#include <algorithm>
#include <cctype>
#include <filesystem>

#include "autog/table_io.hpp"
#include "autog/util.hpp"
#include "io_detail.hpp"

namespace autog {

namespace {

bool looks_nan(const std::string& text) {
  std::string lower;
  for (char c : text) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return lower == "nan" || lower == "na" || lower == "null" || lower == "none";
}

Scalar scalar_from_cell(const Cell& cell) {
  if (is_null(cell)) return Scalar{};
  return cell_to_scalar(cell);
}

// Two-pass policy for key-like and category columns: if every non-null cell
// parses as an integer the whole column becomes integers, otherwise strings.
// Mixed representations in one key space would break value matching.
bool column_all_int(const std::vector<Cell>& cells, bool flatten_lists) {
  bool saw_value = false;
  auto check = [&](const Scalar& value) {
    if (is_null(value)) return true;
    saw_value = true;
    if (std::holds_alternative<std::int64_t>(value)) return true;
    if (std::holds_alternative<double>(value)) {
      const double d = std::get<double>(value);
      return d == static_cast<std::int64_t>(d);
    }
    const auto& text = std::get<std::string>(value);
    if (looks_nan(text)) return true;
    std::int64_t unused;
    return io_detail::parse_int(text, &unused);
  };
  for (const auto& cell : cells) {
    if (flatten_lists && is_list(cell)) {
      for (const auto& item : std::get<std::vector<Scalar>>(cell)) {
        if (!check(item)) return false;
      }
    } else if (!is_list(cell) && !is_tensor(cell)) {
      if (!check(scalar_from_cell(cell))) return false;
    }
  }
  return saw_value;
}

Scalar coerce_scalar(const Scalar& value, DataType dtype, bool force_int) {
  if (is_null(value)) return Scalar{};
  switch (dtype) {
    case DataType::kPrimaryKey:
    case DataType::kForeignKey:
    case DataType::kCategory:
    case DataType::kMultiCategory: {
      if (force_int) {
        if (const auto* i = std::get_if<std::int64_t>(&value)) return *i;
        if (const auto* d = std::get_if<double>(&value)) return static_cast<std::int64_t>(*d);
        const auto& text = std::get<std::string>(value);
        if (looks_nan(text)) return Scalar{};
        std::int64_t parsed;
        io_detail::parse_int(text, &parsed);
        return parsed;
      }
      if (const auto* s = std::get_if<std::string>(&value)) {
        if (s->empty() || looks_nan(*s)) return Scalar{};
        return *s;
      }
      return scalar_to_string(value);
    }
    case DataType::kNumeric: {
      if (const auto* i = std::get_if<std::int64_t>(&value)) return *i;
      if (const auto* d = std::get_if<double>(&value)) return *d;
      const auto& text = std::get<std::string>(value);
      if (looks_nan(text)) return Scalar{};
      std::int64_t as_int;
      if (io_detail::parse_int(text, &as_int)) return as_int;
      double as_real;
      if (io_detail::parse_real(text, &as_real)) return as_real;
      throw IoError("value '" + text + "' is not numeric");
    }
    case DataType::kText:
    case DataType::kTimestamp: {
      if (const auto* s = std::get_if<std::string>(&value)) return *s;
      return scalar_to_string(value);
    }
    default:
      return value;
  }
}

Column coerce_column(const Column& raw, DataType dtype, const std::string& table,
                     const std::string& name) {
  Column out;
  out.cells.reserve(raw.cells.size());
  switch (dtype) {
    case DataType::kEmbedding: {
      std::size_t width = 0;
      for (const auto& cell : raw.cells) {
        std::vector<double> vec;
        if (is_tensor(cell)) {
          vec = std::get<std::vector<double>>(cell);
        } else if (is_list(cell)) {
          for (const auto& item : std::get<std::vector<Scalar>>(cell)) {
            const auto number = scalar_as_number(item);
            if (!number) {
              throw IoError("embedding column '" + table + "." + name +
                            "' has a non-numeric element");
            }
            vec.push_back(*number);
          }
        } else if (is_null(cell)) {
          out.cells.emplace_back();
          continue;
        } else {
          throw IoError("embedding column '" + table + "." + name + "' has a scalar cell");
        }
        if (width == 0) width = vec.size();
        if (vec.size() != width) {
          throw IoError("embedding column '" + table + "." + name + "' is not fixed-width");
        }
        out.cells.emplace_back(std::move(vec));
      }
      return out;
    }
    case DataType::kMultiCategory: {
      const bool force_int = column_all_int(raw.cells, true);
      for (const auto& cell : raw.cells) {
        if (is_null(cell)) {
          out.cells.emplace_back(std::vector<Scalar>{});
          continue;
        }
        if (!is_list(cell)) {
          // A bare scalar reads as a singleton list.
          std::vector<Scalar> items{coerce_scalar(scalar_from_cell(cell), dtype, force_int)};
          out.cells.emplace_back(std::move(items));
          continue;
        }
        std::vector<Scalar> items;
        for (const auto& item : std::get<std::vector<Scalar>>(cell)) {
          auto coerced = coerce_scalar(item, dtype, force_int);
          if (!is_null(coerced)) items.push_back(std::move(coerced));
        }
        out.cells.emplace_back(std::move(items));
      }
      return out;
    }
    default: {
      const bool force_int =
          (dtype == DataType::kPrimaryKey || dtype == DataType::kForeignKey ||
           dtype == DataType::kCategory) &&
          column_all_int(raw.cells, false);
      for (const auto& cell : raw.cells) {
        if (is_list(cell) || is_tensor(cell)) {
          throw IoError("column '" + table + "." + name + "' declared " +
                        dtype_to_string(dtype) + " but holds list cells");
        }
        if (is_null(cell)) {
          out.cells.emplace_back();
          continue;
        }
        const auto scalar = scalar_from_cell(cell);
        if (const auto* s = std::get_if<std::string>(&scalar); s && s->empty()) {
          if (dtype == DataType::kText || dtype == DataType::kTimestamp) {
            out.cells.emplace_back(std::string{});
          } else {
            out.cells.emplace_back();
          }
          continue;
        }
        out.cells.push_back(scalar_to_cell(coerce_scalar(scalar, dtype, force_int)));
      }
      return out;
    }
  }
}

}  // namespace

LoadResult load_table(const TableDef& def, const std::string& data_root) {
  namespace fs = std::filesystem;
  fs::path path(def.source);
  if (path.is_relative() && !data_root.empty()) path = fs::path(data_root) / path;
  if (!fs::exists(path)) {
    throw IoError("table '" + def.name + "': source file '" + path.string() + "' is missing");
  }

  RawTable raw;
  switch (def.format) {
    case TableFormat::kCsv: raw = read_csv(path.string()); break;
    case TableFormat::kNpz: raw = read_npz(path.string()); break;
    case TableFormat::kParquet: raw = read_parquet(path.string()); break;
  }
  for (const auto& column : raw.columns) {
    if (column.cells.size() != raw.row_count) {
      throw IoError("table '" + def.name + "': ragged columns in '" + path.string() + "'");
    }
  }

  LoadResult result;
  result.data.table_name = def.name;
  result.data.row_count = raw.row_count;
  for (const auto& column : def.columns) {
    const auto it = std::find(raw.order.begin(), raw.order.end(), column.name);
    if (it == raw.order.end()) {
      throw IoError("table '" + def.name + "': declared column '" + column.name +
                    "' is missing from '" + path.string() + "'");
    }
    const auto index = static_cast<std::size_t>(it - raw.order.begin());
    result.data.add_column(column.name,
                           coerce_column(raw.columns[index], column.dtype, def.name, column.name));
  }
  for (const auto& name : raw.order) {
    if (!def.has_column(name)) {
      result.warnings.push_back("table '" + def.name + "': file column '" + name +
                                "' is not declared in the schema and was not loaded");
    }
  }
  return result;
}

std::map<std::string, TableData> load_dataset(const DatasetSchema& schema,
                                              const std::string& data_root,
                                              std::vector<std::string>* warnings) {
  std::map<std::string, TableData> dataset;
  for (const auto& table : schema.tables) {
    auto loaded = load_table(table, data_root);
    if (warnings) {
      warnings->insert(warnings->end(), loaded.warnings.begin(), loaded.warnings.end());
    }
    dataset.emplace(table.name, std::move(loaded.data));
  }
  return dataset;
}

}  // namespace autog
