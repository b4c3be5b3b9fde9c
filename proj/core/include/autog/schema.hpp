#pragma once

#include <optional>
#include <string>
#include <vector>

namespace autog {

/// Column data types of the RDB schema language. External spellings
/// "float" (numeric), "datetime" (timestamp) and "set" (multi_category) are
/// accepted on input; serialization always emits the canonical alias.
enum class DataType {
  kPrimaryKey,
  kForeignKey,
  kCategory,
  kNumeric,
  kText,
  kMultiCategory,
  kTimestamp,
  kEmbedding,
};

/// Canonical spelling used in YAML output ("float", "datetime", ...).
std::string dtype_to_string(DataType dtype);
/// Accepts canonical spellings and aliases; throws ParseError on unknown.
DataType dtype_from_string(const std::string& text);

enum class TableFormat { kParquet, kCsv, kNpz };

std::string format_to_string(TableFormat format);
TableFormat format_from_string(const std::string& text);

struct ColumnDef {
  std::string name;
  DataType dtype = DataType::kCategory;
  std::optional<std::string> link_to;  // "Table.Column", present iff foreign key
  std::optional<std::string> description;  // planner-side metadata, never serialized

  std::string link_table() const;   // part before the first '.'
  std::string link_column() const;  // part after the first '.'

  // Structural equality ignores `description`: serialization does too, so
  // parse(serialize(s)) == s holds for any valid s.
  friend bool operator==(const ColumnDef& a, const ColumnDef& b) {
    return a.name == b.name && a.dtype == b.dtype && a.link_to == b.link_to;
  }
};

struct TableDef {
  std::string name;
  std::string source;
  TableFormat format = TableFormat::kCsv;
  std::vector<ColumnDef> columns;
  std::optional<std::string> time_column;

  bool has_column(const std::string& name) const;
  const ColumnDef* find_column(const std::string& name) const;
  ColumnDef* find_column(const std::string& name);
  /// The single primary-key column, if declared.
  const ColumnDef* primary_key() const;

  friend bool operator==(const TableDef& a, const TableDef& b) {
    return a.name == b.name && a.source == b.source && a.format == b.format &&
           a.columns == b.columns && a.time_column == b.time_column;
  }
};

/// Implicit key-only table that exists only as a link_to target.
struct DummyTableRef {
  std::string name;
  std::string key_column;

  friend bool operator==(const DummyTableRef& a, const DummyTableRef& b) {
    return a.name == b.name && a.key_column == b.key_column;
  }
  friend bool operator<(const DummyTableRef& a, const DummyTableRef& b) {
    return a.name != b.name ? a.name < b.name : a.key_column < b.key_column;
  }
};

struct DatasetSchema {
  std::string dataset_name;
  std::vector<TableDef> tables;
  std::vector<DummyTableRef> derived;  // kept sorted by name

  bool has_table(const std::string& name) const;
  const TableDef* find_table(const std::string& name) const;
  TableDef* find_table(const std::string& name);
  const DummyTableRef* find_dummy(const std::string& name) const;
  /// Declared table index, or npos for dummies/unknown names.
  std::size_t table_index(const std::string& name) const;

  friend bool operator==(const DatasetSchema& a, const DatasetSchema& b) {
    return a.dataset_name == b.dataset_name && a.tables == b.tables && a.derived == b.derived;
  }
};

struct Violation {
  std::string table;
  std::string column;  // empty when table-level
  std::string rule;    // stable id, e.g. "single-pk", "dangling-link"
  std::string message;
};

/// Parses the YAML schema format and normalizes it: dtype aliases are
/// canonicalized and link_to targets naming undeclared tables are collected
/// into `derived` (see resolve_links). Throws ParseError on syntax errors
/// (with line/column), unknown dtypes, duplicate names, bad identifiers, or
/// link_to on a non-FK column.
DatasetSchema parse_schema(const std::string& yaml_text);

/// Canonical, byte-deterministic YAML. Key order: dataset_name, tables;
/// per table name, source, format, columns, time_column; per column name,
/// dtype, link_to. Dummy tables are never emitted as table blocks.
std::string serialize_schema(const DatasetSchema& schema);

/// All invariant violations, empty when the schema is well-formed.
std::vector<Violation> validate_schema(const DatasetSchema& schema);

/// Materializes a DummyTableRef for every link_to that names an undeclared
/// table; FKs naming the same dummy share one key space. A link_to that names
/// a declared table's non-PK column throws (that connection must go through
/// the connect_two_columns action). When `frozen_dummies` is set no new dummy
/// is created and such links are left for validate_schema to flag.
DatasetSchema resolve_links(const DatasetSchema& schema, bool frozen_dummies = false);

}  // namespace autog
