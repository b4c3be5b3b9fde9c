#include "autog/graph.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "autog/table_io.hpp"
#include "autog/util.hpp"

namespace autog {

std::string build_mode_to_string(BuildMode mode) {
  return mode == BuildMode::kRow2Node ? "row2node" : "row2node_edge";
}

BuildMode build_mode_from_string(const std::string& text) {
  if (text == "row2node") return BuildMode::kRow2Node;
  if (text == "row2node_edge") return BuildMode::kRow2NodeEdge;
  throw ParseError("unknown build mode '" + text + "'");
}

std::vector<TableRole> classify_tables(const DatasetSchema& schema, BuildMode mode,
                                       std::vector<std::string>* warnings) {
  std::vector<TableRole> roles;
  for (const auto& table : schema.tables) {
    std::size_t fk_count = 0;
    for (const auto& column : table.columns) {
      if (column.dtype == DataType::kForeignKey) ++fk_count;
    }
    const bool has_pk = table.primary_key() != nullptr;
    TableRole role{table.name, TableRoleKind::kNode};
    if (mode == BuildMode::kRow2NodeEdge && !has_pk) {
      if (fk_count == 2) {
        role.role = TableRoleKind::kEdge;
      } else if (fk_count > 2 && warnings) {
        warnings->push_back("table '" + table.name + "' has " + std::to_string(fk_count) +
                            " foreign keys and no primary key; the 2-FK edge heuristic does "
                            "not apply, keeping node role");
      }
    }
    roles.push_back(role);
  }
  for (const auto& dummy : schema.derived) {
    roles.push_back(TableRole{dummy.name, TableRoleKind::kDummyNode});
  }
  return roles;
}

const NodeSet* HeteroGraph::find_node(const std::string& name) const {
  for (const auto& node : nodes) {
    if (node.name == name) return &node;
  }
  return nullptr;
}

const EdgeSet* HeteroGraph::find_edge(const std::string& relation) const {
  for (const auto& edge : edges) {
    if (edge.relation == relation) return &edge;
  }
  return nullptr;
}

std::int64_t HeteroGraph::total_edges() const {
  std::int64_t total = 0;
  for (const auto& edge : edges) total += static_cast<std::int64_t>(edge.endpoints.size());
  return total;
}

namespace {

struct TargetIndex {
  // Maps an FK cell to a destination row index. Dummies index by code;
  // declared tables index by primary-key value.
  bool dummy = false;
  std::int64_t count = 0;
  std::unordered_map<std::string, std::int64_t> by_value;

  std::optional<std::int64_t> resolve(const Cell& cell) const {
    if (dummy) {
      const auto* code = std::get_if<std::int64_t>(&cell);
      if (!code || *code < 0 || *code >= count) return std::nullopt;
      return *code;
    }
    const auto it = by_value.find(scalar_to_string(cell_to_scalar(cell)) + "#" +
                                  std::to_string(cell.index()));
    if (it == by_value.end()) return std::nullopt;
    return it->second;
  }
};

std::string value_index_key(const Cell& cell) {
  return scalar_to_string(cell_to_scalar(cell)) + "#" + std::to_string(cell.index());
}

std::vector<std::string> timestamps_of(const TableDef& def, const TableData& data) {
  std::vector<std::string> out;
  const auto& column = data.column(*def.time_column);
  out.reserve(column.cells.size());
  for (const auto& cell : column.cells) {
    out.push_back(is_null(cell) ? "" : cell_to_string(cell));
  }
  return out;
}

}  // namespace

HeteroGraph build_graph(const Database& db, BuildMode mode, std::vector<std::string>* warnings) {
  const auto roles = classify_tables(db.schema, mode, warnings);
  std::map<std::string, TableRoleKind> role_of;
  for (const auto& role : roles) role_of[role.table] = role.role;

  HeteroGraph graph;
  std::map<std::string, TargetIndex> targets;

  // Node sets and endpoint indexes.
  for (const auto& table : db.schema.tables) {
    if (role_of[table.name] == TableRoleKind::kEdge) continue;
    const auto& data = db.table(table.name);
    NodeSet node;
    node.name = table.name;
    node.count = static_cast<std::int64_t>(data.row_count);
    node.features.table_name = table.name;
    node.features.row_count = data.row_count;
    for (const auto& column : table.columns) {
      if (column.dtype == DataType::kPrimaryKey || column.dtype == DataType::kForeignKey) {
        continue;
      }
      if (table.time_column && column.name == *table.time_column) continue;
      node.features.add_column(column.name, data.column(column.name));
    }
    if (table.time_column) node.timestamps = timestamps_of(table, data);
    graph.nodes.push_back(std::move(node));

    TargetIndex index;
    index.count = static_cast<std::int64_t>(data.row_count);
    if (const auto* pk = table.primary_key()) {
      const auto& cells = data.column(pk->name).cells;
      for (std::size_t row = 0; row < cells.size(); ++row) {
        if (is_null(cells[row])) continue;
        index.by_value[value_index_key(cells[row])] = static_cast<std::int64_t>(row);
      }
    }
    targets[table.name] = std::move(index);
  }
  for (const auto& dummy : db.schema.derived) {
    const auto it = db.dummies.find(dummy.name);
    const std::int64_t count =
        it == db.dummies.end() ? 0 : static_cast<std::int64_t>(it->second.row_count);
    NodeSet node;
    node.name = dummy.name;
    node.count = count;
    node.dummy = true;
    node.features.table_name = dummy.name;
    node.features.row_count = static_cast<std::size_t>(count);
    graph.nodes.push_back(std::move(node));
    TargetIndex index;
    index.dummy = true;
    index.count = count;
    targets[dummy.name] = std::move(index);
  }
  std::sort(graph.nodes.begin(), graph.nodes.end(),
            [](const NodeSet& a, const NodeSet& b) { return a.name < b.name; });

  // Forward edge sets.
  for (const auto& table : db.schema.tables) {
    const auto& data = db.table(table.name);
    if (role_of[table.name] == TableRoleKind::kEdge) {
      std::vector<const ColumnDef*> fks;
      for (const auto& column : table.columns) {
        if (column.dtype == DataType::kForeignKey) fks.push_back(&column);
      }
      EdgeSet edge;
      edge.source = fks[0]->link_table();
      edge.destination = fks[1]->link_table();
      edge.relation = table.name;
      edge.features.table_name = table.name;
      const auto& src_index = targets.at(edge.source);
      const auto& dst_index = targets.at(edge.destination);
      const auto& src_cells = data.column(fks[0]->name).cells;
      const auto& dst_cells = data.column(fks[1]->name).cells;
      std::vector<std::size_t> kept_rows;
      for (std::size_t row = 0; row < data.row_count; ++row) {
        if (is_null(src_cells[row]) || is_null(dst_cells[row])) continue;
        const auto src = src_index.resolve(src_cells[row]);
        const auto dst = dst_index.resolve(dst_cells[row]);
        if (!src || !dst) {
          throw IoError("foreign-key value out of key-space range in edge table '" + table.name +
                        "' row " + std::to_string(row));
        }
        edge.endpoints.emplace_back(*src, *dst);
        kept_rows.push_back(row);
      }
      for (const auto& column : table.columns) {
        if (column.dtype == DataType::kForeignKey || column.dtype == DataType::kPrimaryKey) {
          continue;
        }
        if (table.time_column && column.name == *table.time_column) continue;
        Column kept;
        const auto& cells = data.column(column.name).cells;
        for (const auto row : kept_rows) kept.cells.push_back(cells[row]);
        edge.features.add_column(column.name, std::move(kept));
      }
      edge.features.row_count = kept_rows.size();
      if (table.time_column) {
        const auto all = timestamps_of(table, data);
        std::vector<std::string> kept;
        for (const auto row : kept_rows) kept.push_back(all[row]);
        edge.timestamps = std::move(kept);
      }
      graph.edges.push_back(std::move(edge));
      continue;
    }

    // Node-role table: each FK column is a relation "Table.column".
    for (const auto& column : table.columns) {
      if (column.dtype != DataType::kForeignKey) continue;
      EdgeSet edge;
      edge.source = table.name;
      edge.destination = column.link_table();
      edge.relation = table.name + "." + column.name;
      edge.features.table_name = edge.relation;
      edge.features.row_count = 0;
      const auto& dst_index = targets.at(edge.destination);
      const auto& cells = data.column(column.name).cells;
      for (std::size_t row = 0; row < cells.size(); ++row) {
        if (is_null(cells[row])) continue;
        const auto dst = dst_index.resolve(cells[row]);
        if (!dst) {
          throw IoError("foreign-key value out of key-space range in " + table.name + "." +
                        column.name + " row " + std::to_string(row));
        }
        edge.endpoints.emplace_back(static_cast<std::int64_t>(row), *dst);
      }
      graph.edges.push_back(std::move(edge));
    }
  }

  // Reverse twins.
  const std::size_t forward = graph.edges.size();
  for (std::size_t i = 0; i < forward; ++i) {
    EdgeSet rev;
    rev.source = graph.edges[i].destination;
    rev.destination = graph.edges[i].source;
    rev.relation = graph.edges[i].relation + "_rev";
    rev.features = graph.edges[i].features;
    rev.timestamps = graph.edges[i].timestamps;
    rev.reverse_of_forward = true;
    rev.endpoints.reserve(graph.edges[i].endpoints.size());
    for (const auto& [s, d] : graph.edges[i].endpoints) rev.endpoints.emplace_back(d, s);
    graph.edges.push_back(std::move(rev));
  }
  return graph;
}

GraphSummary graph_summary(const HeteroGraph& graph) {
  GraphSummary summary;
  nlohmann::ordered_json manifest;
  std::int64_t node_total = 0;
  for (const auto& node : graph.nodes) node_total += node.count;

  std::vector<const EdgeSet*> ordered;
  for (const auto& edge : graph.edges) ordered.push_back(&edge);
  std::sort(ordered.begin(), ordered.end(),
            [](const EdgeSet* a, const EdgeSet* b) { return a->relation < b->relation; });

  std::ostringstream out;
  out << "graph: " << graph.nodes.size() << " node types, " << graph.edges.size()
      << " edge types, " << node_total << " nodes, " << graph.total_edges() << " edges\n";
  out << "node types:\n";
  nlohmann::ordered_json node_types = nlohmann::ordered_json::object();
  for (const auto& node : graph.nodes) {
    out << "  " << node.name << ": " << node.count << " nodes";
    if (node.dummy) out << " (dummy)";
    if (!node.features.order.empty()) {
      out << ", features [" << join(node.features.order, ", ") << "]";
    }
    if (node.timestamps) out << ", timestamped";
    out << "\n";
    nlohmann::ordered_json entry;
    entry["count"] = node.count;
    entry["dummy"] = node.dummy;
    entry["features"] = node.features.order;
    entry["timestamped"] = node.timestamps.has_value();
    node_types[node.name] = entry;
  }
  out << "edge types:\n";
  nlohmann::ordered_json edge_types = nlohmann::ordered_json::object();
  for (const auto* edge : ordered) {
    std::unordered_map<std::int64_t, std::int64_t> out_degree;
    std::int64_t max_degree = 0;
    for (const auto& [s, d] : edge->endpoints) {
      max_degree = std::max(max_degree, ++out_degree[s]);
    }
    const double mean_degree =
        out_degree.empty() ? 0.0
                           : static_cast<double>(edge->endpoints.size()) /
                                 static_cast<double>(out_degree.size());
    out << "  " << edge->relation << ": " << edge->source << " -> " << edge->destination << ", "
        << edge->endpoints.size() << " edges, out-degree mean " << format_double(mean_degree, 2)
        << " max " << max_degree;
    if (!edge->features.order.empty()) {
      out << ", features [" << join(edge->features.order, ", ") << "]";
    }
    out << "\n";
    nlohmann::ordered_json entry;
    entry["source"] = edge->source;
    entry["destination"] = edge->destination;
    entry["count"] = edge->endpoints.size();
    entry["features"] = edge->features.order;
    entry["reverse"] = edge->reverse_of_forward;
    edge_types[edge->relation] = entry;
  }
  manifest["node_types"] = node_types;
  manifest["edge_types"] = edge_types;
  manifest["total_nodes"] = node_total;
  manifest["total_edges"] = graph.total_edges();
  summary.text = out.str();
  summary.manifest = manifest;
  return summary;
}

void export_graph(const HeteroGraph& graph, const std::string& directory) {
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  nlohmann::ordered_json manifest;
  manifest["format"] = "autog-graph-v1";
  nlohmann::ordered_json node_entries = nlohmann::ordered_json::object();
  for (const auto& node : graph.nodes) {
    TableData table = node.features;
    table.table_name = node.name;
    Column ids;
    for (std::int64_t i = 0; i < node.count; ++i) ids.cells.push_back(i);
    table.order.insert(table.order.begin(), "node_id");
    table.columns.insert(table.columns.begin(), std::move(ids));
    table.row_count = static_cast<std::size_t>(node.count);
    if (node.timestamps) {
      Column stamps;
      for (const auto& t : *node.timestamps) {
        stamps.cells.push_back(t.empty() ? Cell{} : Cell{t});
      }
      table.add_column("timestamp", std::move(stamps));
    }
    const std::string file = "node__" + node.name + ".csv";
    write_csv((fs::path(directory) / file).string(), table);
    nlohmann::ordered_json entry;
    entry["file"] = file;
    entry["count"] = node.count;
    entry["dummy"] = node.dummy;
    entry["features"] = node.features.order;
    node_entries[node.name] = entry;
  }
  nlohmann::ordered_json edge_entries = nlohmann::ordered_json::object();
  for (const auto& edge : graph.edges) {
    TableData table;
    table.table_name = edge.relation;
    table.row_count = edge.endpoints.size();
    Column src, dst;
    for (const auto& [s, d] : edge.endpoints) {
      src.cells.push_back(s);
      dst.cells.push_back(d);
    }
    table.add_column("src", std::move(src));
    table.add_column("dst", std::move(dst));
    for (std::size_t c = 0; c < edge.features.order.size(); ++c) {
      table.add_column(edge.features.order[c], edge.features.columns[c]);
    }
    if (edge.timestamps) {
      Column stamps;
      for (const auto& t : *edge.timestamps) {
        stamps.cells.push_back(t.empty() ? Cell{} : Cell{t});
      }
      table.add_column("timestamp", std::move(stamps));
    }
    const std::string file = "edge__" + edge.relation + ".csv";
    write_csv((fs::path(directory) / file).string(), table);
    nlohmann::ordered_json entry;
    entry["file"] = file;
    entry["source"] = edge.source;
    entry["destination"] = edge.destination;
    entry["count"] = edge.endpoints.size();
    entry["features"] = edge.features.order;
    edge_entries[edge.relation] = entry;
  }
  manifest["node_types"] = node_entries;
  manifest["edge_types"] = edge_entries;
  std::ofstream out(fs::path(directory) / "manifest.json");
  if (!out) throw IoError("cannot write graph manifest in '" + directory + "'");
  out << manifest.dump(2) << "\n";
}

}  // namespace autog
