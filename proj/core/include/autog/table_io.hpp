#pragma once

#include <map>
#include <string>
#include <vector>

#include "autog/schema.hpp"
#include "autog/value.hpp"

namespace autog {

/// Raw untyped column file content before schema-driven coercion.
struct RawTable {
  std::vector<std::string> order;
  std::vector<Column> columns;
  std::size_t row_count = 0;
};

// ---- CSV (RFC-4180 quoting; multi-category cells are JSON arrays) ----
RawTable read_csv(const std::string& path);
RawTable parse_csv(const std::string& text);
void write_csv(const std::string& path, const TableData& table);
std::string csv_to_string(const TableData& table);

// ---- npz-like columnar container (zip of npy v1 arrays, one per column) ----
RawTable read_npz(const std::string& path);
void write_npz(const std::string& path, const TableData& table);

// ---- minimal parquet subset (PLAIN encoding, uncompressed, single row
//      group; optional scalars and three-level LIST columns) ----
RawTable read_parquet(const std::string& path);
void write_parquet(const std::string& path, const TableData& table);

struct LoadResult {
  TableData data;
  std::vector<std::string> warnings;  // e.g. undeclared file columns skipped
};

/// Loads the table payload named by `def.source` (resolved against
/// `data_root` when relative), coerces cells to the declared dtypes, and
/// reports undeclared file columns as warnings. Throws IoError on a missing
/// file, a missing declared column, or ragged columns.
LoadResult load_table(const TableDef& def, const std::string& data_root = "");

/// Payload for every declared table of the schema.
std::map<std::string, TableData> load_dataset(const DatasetSchema& schema,
                                              const std::string& data_root,
                                              std::vector<std::string>* warnings = nullptr);

}  // namespace autog
