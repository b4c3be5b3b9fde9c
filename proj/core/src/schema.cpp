#include "autog/schema.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "autog/util.hpp"

namespace autog {

std::string dtype_to_string(DataType dtype) {
  switch (dtype) {
    case DataType::kPrimaryKey: return "primary_key";
    case DataType::kForeignKey: return "foreign_key";
    case DataType::kCategory: return "category";
    case DataType::kNumeric: return "float";
    case DataType::kText: return "text";
    case DataType::kMultiCategory: return "multi_category";
    case DataType::kTimestamp: return "datetime";
    case DataType::kEmbedding: return "embedding";
  }
  return "category";
}

DataType dtype_from_string(const std::string& text) {
  if (text == "primary_key") return DataType::kPrimaryKey;
  if (text == "foreign_key") return DataType::kForeignKey;
  if (text == "category") return DataType::kCategory;
  if (text == "float" || text == "numeric") return DataType::kNumeric;
  if (text == "text") return DataType::kText;
  if (text == "multi_category" || text == "set") return DataType::kMultiCategory;
  if (text == "datetime" || text == "timestamp") return DataType::kTimestamp;
  if (text == "embedding") return DataType::kEmbedding;
  throw ParseError("unknown dtype '" + text + "'");
}

std::string format_to_string(TableFormat format) {
  switch (format) {
    case TableFormat::kParquet: return "parquet";
    case TableFormat::kCsv: return "csv";
    case TableFormat::kNpz: return "npz";
  }
  return "csv";
}

TableFormat format_from_string(const std::string& text) {
  if (text == "parquet") return TableFormat::kParquet;
  if (text == "csv") return TableFormat::kCsv;
  if (text == "npz") return TableFormat::kNpz;
  throw ParseError("unknown table format '" + text + "'");
}

std::string ColumnDef::link_table() const {
  if (!link_to) return {};
  const auto dot = link_to->find('.');
  return dot == std::string::npos ? *link_to : link_to->substr(0, dot);
}

std::string ColumnDef::link_column() const {
  if (!link_to) return {};
  const auto dot = link_to->find('.');
  return dot == std::string::npos ? std::string{} : link_to->substr(dot + 1);
}

bool TableDef::has_column(const std::string& column_name) const {
  return find_column(column_name) != nullptr;
}

const ColumnDef* TableDef::find_column(const std::string& column_name) const {
  for (const auto& column : columns) {
    if (column.name == column_name) return &column;
  }
  return nullptr;
}

ColumnDef* TableDef::find_column(const std::string& column_name) {
  for (auto& column : columns) {
    if (column.name == column_name) return &column;
  }
  return nullptr;
}

const ColumnDef* TableDef::primary_key() const {
  for (const auto& column : columns) {
    if (column.dtype == DataType::kPrimaryKey) return &column;
  }
  return nullptr;
}

bool DatasetSchema::has_table(const std::string& table_name) const {
  return find_table(table_name) != nullptr;
}

const TableDef* DatasetSchema::find_table(const std::string& table_name) const {
  for (const auto& table : tables) {
    if (table.name == table_name) return &table;
  }
  return nullptr;
}

TableDef* DatasetSchema::find_table(const std::string& table_name) {
  for (auto& table : tables) {
    if (table.name == table_name) return &table;
  }
  return nullptr;
}

const DummyTableRef* DatasetSchema::find_dummy(const std::string& dummy_name) const {
  for (const auto& dummy : derived) {
    if (dummy.name == dummy_name) return &dummy;
  }
  return nullptr;
}

std::size_t DatasetSchema::table_index(const std::string& table_name) const {
  for (std::size_t i = 0; i < tables.size(); ++i) {
    if (tables[i].name == table_name) return i;
  }
  return static_cast<std::size_t>(-1);
}

namespace {

[[noreturn]] void fail_at(const YAML::Node& node, const std::string& message) {
  throw ParseError(message, node.Mark().line + 1, node.Mark().column + 1);
}

std::string require_string(const YAML::Node& node, const char* key) {
  const auto value = node[key];
  if (!value || !value.IsScalar()) {
    fail_at(node, std::string("missing or non-scalar key '") + key + "'");
  }
  return value.as<std::string>();
}

void reject_unknown_keys(const YAML::Node& node, std::initializer_list<const char*> allowed) {
  for (const auto& entry : node) {
    const auto key = entry.first.as<std::string>();
    bool known = false;
    for (const char* candidate : allowed) {
      if (key == candidate) {
        known = true;
        break;
      }
    }
    if (!known) fail_at(entry.first, "unknown key '" + key + "'");
  }
}

std::string check_identifier(const YAML::Node& at, const std::string& name,
                             const char* what) {
  if (!is_identifier(name)) {
    fail_at(at, std::string(what) + " '" + name + "' is not a valid identifier");
  }
  return name;
}

ColumnDef parse_column(const YAML::Node& node) {
  if (!node.IsMap()) fail_at(node, "column entry must be a mapping");
  reject_unknown_keys(node, {"name", "dtype", "link_to"});
  ColumnDef column;
  column.name = check_identifier(node, require_string(node, "name"), "column name");
  try {
    column.dtype = dtype_from_string(require_string(node, "dtype"));
  } catch (const ParseError& e) {
    fail_at(node["dtype"], e.what());
  }
  if (node["link_to"]) {
    if (column.dtype != DataType::kForeignKey) {
      fail_at(node["link_to"], "link_to on non-foreign-key column '" + column.name + "'");
    }
    const auto target = node["link_to"].as<std::string>();
    const auto dot = target.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == target.size()) {
      fail_at(node["link_to"], "link_to must be 'Table.Column', got '" + target + "'");
    }
    column.link_to = target;
  }
  return column;
}

TableDef parse_table(const YAML::Node& node) {
  if (!node.IsMap()) fail_at(node, "table entry must be a mapping");
  reject_unknown_keys(node, {"name", "source", "format", "columns", "time_column"});
  TableDef table;
  table.name = check_identifier(node, require_string(node, "name"), "table name");
  table.source = require_string(node, "source");
  try {
    table.format = format_from_string(require_string(node, "format"));
  } catch (const ParseError& e) {
    fail_at(node["format"], e.what());
  }
  const auto columns = node["columns"];
  if (!columns || !columns.IsSequence()) {
    fail_at(node, "table '" + table.name + "' has no columns sequence");
  }
  std::set<std::string> seen;
  for (const auto& entry : columns) {
    auto column = parse_column(entry);
    if (!seen.insert(column.name).second) {
      fail_at(entry, "duplicate column name '" + column.name + "' in table '" + table.name + "'");
    }
    table.columns.push_back(std::move(column));
  }
  if (node["time_column"]) {
    table.time_column = node["time_column"].as<std::string>();
  }
  return table;
}

}  // namespace

DatasetSchema parse_schema(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::ParserException& e) {
    throw ParseError(std::string("YAML syntax error: ") + e.msg, e.mark.line + 1,
                     e.mark.column + 1);
  }
  if (!root.IsMap()) throw ParseError("schema document must be a mapping");
  reject_unknown_keys(root, {"dataset_name", "tables"});

  DatasetSchema schema;
  schema.dataset_name =
      check_identifier(root, require_string(root, "dataset_name"), "dataset name");
  const auto tables = root["tables"];
  if (!tables) throw ParseError("missing 'tables' key");
  if (!tables.IsSequence() && !tables.IsNull()) fail_at(tables, "'tables' must be a sequence");

  std::set<std::string> seen;
  if (tables.IsSequence()) {
    for (const auto& entry : tables) {
      auto table = parse_table(entry);
      if (!seen.insert(table.name).second) {
        fail_at(entry, "duplicate table name '" + table.name + "'");
      }
      schema.tables.push_back(std::move(table));
    }
  }
  return resolve_links(schema);
}

std::string serialize_schema(const DatasetSchema& schema) {
  std::ostringstream out;
  out << "dataset_name: " << schema.dataset_name << "\n";
  if (schema.tables.empty()) {
    out << "tables: []\n";
    return out.str();
  }
  out << "tables:\n";
  for (const auto& table : schema.tables) {
    out << "  - name: " << table.name << "\n";
    out << "    source: " << table.source << "\n";
    out << "    format: " << format_to_string(table.format) << "\n";
    out << "    columns:\n";
    for (const auto& column : table.columns) {
      out << "      - name: " << column.name << "\n";
      out << "        dtype: " << dtype_to_string(column.dtype) << "\n";
      if (column.link_to) {
        out << "        link_to: " << *column.link_to << "\n";
      }
    }
    if (table.time_column) {
      out << "    time_column: " << *table.time_column << "\n";
    }
  }
  return out.str();
}

std::vector<Violation> validate_schema(const DatasetSchema& schema) {
  std::vector<Violation> violations;
  auto flag = [&](const std::string& table, const std::string& column, const std::string& rule,
                  const std::string& message) {
    violations.push_back(Violation{table, column, rule, message});
  };

  std::set<std::string> table_names;
  for (const auto& table : schema.tables) {
    if (!table_names.insert(table.name).second) {
      flag(table.name, "", "dup-table", "duplicate table name '" + table.name + "'");
    }
    if (!is_identifier(table.name)) {
      flag(table.name, "", "bad-identifier", "table name is not a valid identifier");
    }
    if (table.columns.empty()) {
      flag(table.name, "", "empty-table", "table '" + table.name + "' has no columns");
    }
    std::set<std::string> column_names;
    int pk_count = 0;
    for (const auto& column : table.columns) {
      if (!column_names.insert(column.name).second) {
        flag(table.name, column.name, "dup-column",
             "duplicate column name '" + column.name + "'");
      }
      if (!is_identifier(column.name)) {
        flag(table.name, column.name, "bad-identifier",
             "column name is not a valid identifier");
      }
      if (column.dtype == DataType::kPrimaryKey) ++pk_count;
      if (column.link_to && column.dtype != DataType::kForeignKey) {
        flag(table.name, column.name, "link-on-non-fk",
             "link_to present on non-foreign-key column");
      }
      if (!column.link_to && column.dtype == DataType::kForeignKey) {
        flag(table.name, column.name, "fk-missing-link",
             "foreign-key column has no link_to target");
      }
    }
    if (pk_count > 1) {
      flag(table.name, "", "single-pk",
           "table '" + table.name + "' declares " + std::to_string(pk_count) +
               " primary keys");
    }
    if (table.time_column) {
      const auto* column = table.find_column(*table.time_column);
      if (!column) {
        flag(table.name, *table.time_column, "time-column-missing",
             "time_column names an undeclared column");
      } else if (column->dtype != DataType::kTimestamp) {
        flag(table.name, *table.time_column, "time-column-type",
             "time_column must have datetime dtype");
      }
    }
  }

  std::set<std::string> referenced_dummies;
  for (const auto& table : schema.tables) {
    for (const auto& column : table.columns) {
      if (!column.link_to) continue;
      const auto target_table = column.link_table();
      const auto target_column = column.link_column();
      if (const auto* declared = schema.find_table(target_table)) {
        const auto* target = declared->find_column(target_column);
        if (!target) {
          flag(table.name, column.name, "dangling-link",
               "link_to target column '" + *column.link_to + "' does not exist");
        } else if (target->dtype != DataType::kPrimaryKey) {
          flag(table.name, column.name, "non-pk-link",
               "link_to target '" + *column.link_to + "' is not a primary key");
        }
      } else if (const auto* dummy = schema.find_dummy(target_table)) {
        referenced_dummies.insert(dummy->name);
        if (dummy->key_column != target_column) {
          flag(table.name, column.name, "dummy-key-mismatch",
               "dummy table '" + target_table + "' is keyed by '" + dummy->key_column +
                   "', not '" + target_column + "'");
        }
      } else {
        flag(table.name, column.name, "dangling-link",
             "link_to target table '" + target_table + "' is neither declared nor a dummy");
      }
    }
  }
  for (const auto& dummy : schema.derived) {
    if (schema.has_table(dummy.name)) {
      flag(dummy.name, "", "dummy-collision",
           "dummy table '" + dummy.name + "' collides with a declared table");
    } else if (!referenced_dummies.count(dummy.name)) {
      flag(dummy.name, "", "orphan-dummy",
           "dummy table '" + dummy.name + "' has no inbound foreign key");
    }
  }
  return violations;
}

DatasetSchema resolve_links(const DatasetSchema& schema, bool frozen_dummies) {
  DatasetSchema resolved = schema;
  std::map<std::string, std::string> dummy_keys;  // keeps derived deterministic
  if (frozen_dummies) {
    for (const auto& dummy : resolved.derived) dummy_keys[dummy.name] = dummy.key_column;
  }
  for (const auto& table : resolved.tables) {
    for (const auto& column : table.columns) {
      if (!column.link_to) continue;
      const auto target_table = column.link_table();
      const auto target_column = column.link_column();
      if (const auto* declared = resolved.find_table(target_table)) {
        const auto* target = declared->find_column(target_column);
        if (target && target->dtype == DataType::kPrimaryKey) continue;
        throw ParseError("link_to '" + *column.link_to + "' from " + table.name + "." +
                         column.name +
                         " names a declared table's non-primary-key column; use the "
                         "connect_two_columns action instead");
      }
      const auto it = dummy_keys.find(target_table);
      if (it != dummy_keys.end()) {
        if (it->second != target_column) {
          throw ParseError("dummy table '" + target_table + "' is referenced with key '" +
                           it->second + "' and key '" + target_column + "'");
        }
        continue;
      }
      if (!frozen_dummies) dummy_keys[target_table] = target_column;
    }
  }
  if (!frozen_dummies) {
    resolved.derived.clear();
    for (const auto& [name, key] : dummy_keys) {
      resolved.derived.push_back(DummyTableRef{name, key});
    }
  }
  return resolved;
}

}  // namespace autog
