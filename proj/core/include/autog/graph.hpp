#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "autog/actions.hpp"
#include "autog/schema.hpp"
#include "autog/value.hpp"

#include "json.hpp"

namespace autog {

enum class BuildMode { kRow2Node, kRow2NodeEdge };

std::string build_mode_to_string(BuildMode mode);
BuildMode build_mode_from_string(const std::string& text);

enum class TableRoleKind { kNode, kEdge, kDummyNode };

struct TableRole {
  std::string table;
  TableRoleKind role = TableRoleKind::kNode;
};

/// Row2Node maps every table (and dummy) to a node type. Row2Node/Edge turns
/// a table with exactly two FK columns and no PK into an edge type; tables
/// with more FKs and no PK fall back to node role with a warning.
std::vector<TableRole> classify_tables(const DatasetSchema& schema, BuildMode mode,
                                       std::vector<std::string>* warnings = nullptr);

struct NodeSet {
  std::string name;
  std::int64_t count = 0;
  bool dummy = false;
  TableData features;  // non-key columns (labels ride along as features)
  std::optional<std::vector<std::string>> timestamps;
};

struct EdgeSet {
  std::string source;
  std::string relation;  // unique across the graph
  std::string destination;
  std::vector<std::pair<std::int64_t, std::int64_t>> endpoints;
  TableData features;  // edge-role tables keep their non-key columns here
  std::optional<std::vector<std::string>> timestamps;
  bool reverse_of_forward = false;  // "_rev" twin
};

struct HeteroGraph {
  std::vector<NodeSet> nodes;  // sorted by name
  std::vector<EdgeSet> edges;  // forward relations first, then their twins

  const NodeSet* find_node(const std::string& name) const;
  const EdgeSet* find_edge(const std::string& relation) const;
  std::int64_t total_edges() const;
};

/// Builds the heterogeneous graph. Edge conventions: every FK column of a
/// node-role table becomes relation "Table.column" (owner -> target); an
/// edge-role table becomes one relation named after the table, its first FK
/// as source and second as destination. Each relation gets a "_rev" twin.
/// Null-links drop edges. Throws IoError on out-of-range FK codes.
HeteroGraph build_graph(const Database& db, BuildMode mode,
                        std::vector<std::string>* warnings = nullptr);

struct GraphSummary {
  std::string text;            // deterministic human-readable block
  nlohmann::ordered_json manifest;  // machine-readable form
};

GraphSummary graph_summary(const HeteroGraph& graph);

/// Export contract consumed by external oracles: one CSV per node type
/// (features + timestamps), one per edge type (src, dst, features), plus
/// manifest.json naming every type.
void export_graph(const HeteroGraph& graph, const std::string& directory);

}  // namespace autog
