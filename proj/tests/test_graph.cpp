#include "doctest.h"

#include <set>

#include "autog/graph.hpp"
#include "autog/util.hpp"
#include "test_support.hpp"

using namespace autog;

namespace {

Column ints(std::initializer_list<std::int64_t> values) {
  Column column;
  for (const auto v : values) column.cells.push_back(v);
  return column;
}

/// paper(PK) + Writes{paper_writer FK->author dummy, arxiv_id FK->paper.PK}.
Database writes_fixture() {
  DatasetSchema schema;
  schema.dataset_name = "mag";
  TableDef paper;
  paper.name = "paper";
  paper.source = "p.csv";
  paper.columns = {ColumnDef{"paperID", DataType::kPrimaryKey, {}, {}},
                   ColumnDef{"label", DataType::kCategory, {}, {}}};
  TableDef writes;
  writes.name = "Writes";
  writes.source = "w.csv";
  writes.columns = {
      ColumnDef{"paper_writer", DataType::kForeignKey, std::string("author.author"), {}},
      ColumnDef{"arxiv_id", DataType::kForeignKey, std::string("paper.paperID"), {}}};
  schema.tables = {paper, writes};

  std::map<std::string, TableData> payload;
  TableData paper_data;
  paper_data.table_name = "paper";
  paper_data.row_count = 4;
  paper_data.add_column("paperID", ints({0, 1, 2, 3}));
  paper_data.add_column("label", ints({1, 1, 2, 2}));
  payload.emplace("paper", std::move(paper_data));
  TableData writes_data;
  writes_data.table_name = "Writes";
  writes_data.row_count = 5;
  Column writer;
  writer.cells = {Cell{std::string("a")}, Cell{std::string("b")}, Cell{std::string("a")},
                  Cell{}, Cell{std::string("c")}};
  writes_data.add_column("paper_writer", std::move(writer));
  writes_data.add_column("arxiv_id", ints({0, 1, 2, 3, 1}));
  payload.emplace("Writes", std::move(writes_data));
  return make_database(std::move(schema), std::move(payload));
}

}  // namespace

TEST_CASE("classify: Writes-style table is edge under row2node_edge, node under row2node") {
  const auto db = writes_fixture();
  const auto edge_roles = classify_tables(db.schema, BuildMode::kRow2NodeEdge);
  const auto node_roles = classify_tables(db.schema, BuildMode::kRow2Node);
  auto role_of = [](const std::vector<TableRole>& roles, const std::string& name) {
    for (const auto& role : roles) {
      if (role.table == name) return role.role;
    }
    return TableRoleKind::kDummyNode;
  };
  CHECK(role_of(edge_roles, "Writes") == TableRoleKind::kEdge);
  CHECK(role_of(node_roles, "Writes") == TableRoleKind::kNode);
  CHECK(role_of(edge_roles, "paper") == TableRoleKind::kNode);
  CHECK(role_of(edge_roles, "author") == TableRoleKind::kDummyNode);
}

TEST_CASE("classify: three FKs without PK falls back to node with a warning") {
  DatasetSchema schema;
  schema.dataset_name = "d";
  TableDef t;
  t.name = "Tri";
  t.source = "t.csv";
  t.columns = {ColumnDef{"a", DataType::kForeignKey, std::string("X.x"), {}},
               ColumnDef{"b", DataType::kForeignKey, std::string("Y.y"), {}},
               ColumnDef{"c", DataType::kForeignKey, std::string("Z.z"), {}}};
  schema.tables = {t};
  schema = resolve_links(schema);
  std::vector<std::string> warnings;
  const auto roles = classify_tables(schema, BuildMode::kRow2NodeEdge, &warnings);
  CHECK(roles[0].role == TableRoleKind::kNode);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("Tri") != std::string::npos);
}

TEST_CASE("build_graph: edge-role table becomes one relation with reverse twin") {
  const auto db = writes_fixture();
  const auto graph = build_graph(db, BuildMode::kRow2NodeEdge);
  // node types: paper + author dummy
  CHECK(graph.nodes.size() == 2);
  const auto* writes = graph.find_edge("Writes");
  REQUIRE(writes);
  CHECK(writes->source == "author");
  CHECK(writes->destination == "paper");
  // one row has a null writer: 4 edges survive out of 5 rows
  CHECK(writes->endpoints.size() == 4);
  const auto* rev = graph.find_edge("Writes_rev");
  REQUIRE(rev);
  REQUIRE(rev->endpoints.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(rev->endpoints[i].first == writes->endpoints[i].second);
    CHECK(rev->endpoints[i].second == writes->endpoints[i].first);
  }
}

TEST_CASE("build_graph: node mode gives the table two outgoing relations") {
  const auto db = writes_fixture();
  const auto graph = build_graph(db, BuildMode::kRow2Node);
  CHECK(graph.nodes.size() == 3);  // paper, Writes, author-dummy
  const auto* by_writer = graph.find_edge("Writes.paper_writer");
  const auto* by_paper = graph.find_edge("Writes.arxiv_id");
  REQUIRE(by_writer);
  REQUIRE(by_paper);
  CHECK(by_writer->endpoints.size() == 4);  // null dropped
  CHECK(by_paper->endpoints.size() == 5);
}

TEST_CASE("empty dataset builds an empty graph") {
  Database db;
  db.schema.dataset_name = "none";
  const auto graph = build_graph(db, BuildMode::kRow2NodeEdge);
  CHECK(graph.nodes.empty());
  CHECK(graph.edges.empty());
  const auto summary = graph_summary(graph);
  CHECK(summary.text.find("0 node types") != std::string::npos);
  CHECK(summary.manifest["total_edges"] == 0);
}

TEST_CASE("edge count conservation on random fixtures") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 30; ++i) {
    autog::testing::GenOptions options;
    options.force_edge_shaped_table = true;
    const auto db = autog::testing::gen_database(rng, options);
    for (const auto mode : {BuildMode::kRow2Node, BuildMode::kRow2NodeEdge}) {
      const auto roles = classify_tables(db.schema, mode);
      std::map<std::string, TableRoleKind> role_of;
      for (const auto& role : roles) role_of[role.table] = role.role;
      const auto graph = build_graph(db, mode);
      for (const auto& table : db.schema.tables) {
        if (role_of[table.name] == TableRoleKind::kEdge) {
          std::vector<const ColumnDef*> fks;
          for (const auto& column : table.columns) {
            if (column.dtype == DataType::kForeignKey) fks.push_back(&column);
          }
          std::size_t survivors = 0;
          const auto& a = db.table(table.name).column(fks[0]->name).cells;
          const auto& b = db.table(table.name).column(fks[1]->name).cells;
          for (std::size_t r = 0; r < a.size(); ++r) {
            if (!is_null(a[r]) && !is_null(b[r])) ++survivors;
          }
          CHECK(graph.find_edge(table.name)->endpoints.size() == survivors);
        } else {
          for (const auto& column : table.columns) {
            if (column.dtype != DataType::kForeignKey) continue;
            std::size_t non_null = 0;
            for (const auto& cell : db.table(table.name).column(column.name).cells) {
              if (!is_null(cell)) ++non_null;
            }
            const auto* edge = graph.find_edge(table.name + "." + column.name);
            REQUIRE(edge);
            CHECK(edge->endpoints.size() == non_null);
          }
        }
      }
      // every forward edge has a reverse twin with swapped endpoints
      for (const auto& edge : graph.edges) {
        if (edge.reverse_of_forward) continue;
        const auto* rev = graph.find_edge(edge.relation + "_rev");
        REQUIRE(rev);
        CHECK(rev->endpoints.size() == edge.endpoints.size());
      }
    }
  }
}

TEST_CASE("both modes carry the same total FK information on edge tables") {
  const auto db = writes_fixture();
  const auto node_graph = build_graph(db, BuildMode::kRow2Node);
  const auto edge_graph = build_graph(db, BuildMode::kRow2NodeEdge);
  // collapsing the Writes edge relation back to a node with two incident
  // relations reproduces the row2node edge sets
  const auto* collapsed = edge_graph.find_edge("Writes");
  const auto* via_writer = node_graph.find_edge("Writes.paper_writer");
  const auto* via_paper = node_graph.find_edge("Writes.arxiv_id");
  std::set<std::pair<std::int64_t, std::int64_t>> pairs;
  for (const auto& [s, d] : collapsed->endpoints) pairs.insert({s, d});
  // rows with both endpoints map 1:1 to (writer, paper) pairs
  std::set<std::pair<std::int64_t, std::int64_t>> joined;
  std::map<std::int64_t, std::int64_t> writer_of, paper_of;
  for (const auto& [row, writer] : via_writer->endpoints) writer_of[row] = writer;
  for (const auto& [row, paper] : via_paper->endpoints) paper_of[row] = paper;
  for (const auto& [row, writer] : writer_of) {
    if (paper_of.count(row)) joined.insert({writer, paper_of[row]});
  }
  CHECK(pairs == joined);
}

TEST_CASE("summary is invariant to edge insertion order") {
  const auto db = writes_fixture();
  auto graph = build_graph(db, BuildMode::kRow2NodeEdge);
  const auto before = graph_summary(graph).text;
  std::reverse(graph.edges.begin(), graph.edges.end());
  std::reverse(graph.nodes.begin(), graph.nodes.end());
  std::sort(graph.nodes.begin(), graph.nodes.end(),
            [](const NodeSet& a, const NodeSet& b) { return a.name < b.name; });
  const auto after = graph_summary(graph).text;
  // headline counts and per-type lines agree (edge section is sorted)
  CHECK(before.substr(0, before.find("edge types:")) ==
        after.substr(0, after.find("edge types:")));
  CHECK(before.substr(before.find("edge types:")) == after.substr(after.find("edge types:")));
}

TEST_CASE("graph export writes the manifest contract") {
  autog::testing::TempDir dir("export");
  const auto db = writes_fixture();
  const auto graph = build_graph(db, BuildMode::kRow2NodeEdge);
  export_graph(graph, dir.str());
  const auto manifest_text = autog::testing::read_file(dir.path() / "manifest.json");
  const auto manifest = nlohmann::json::parse(manifest_text);
  CHECK(manifest["format"] == "autog-graph-v1");
  CHECK(manifest["node_types"].contains("paper"));
  CHECK(manifest["node_types"].contains("author"));
  CHECK(manifest["edge_types"].contains("Writes"));
  CHECK(manifest["edge_types"].contains("Writes_rev"));
  for (const auto& [name, entry] : manifest["node_types"].items()) {
    CHECK(std::filesystem::exists(dir.path() / entry["file"].get<std::string>()));
  }
  for (const auto& [name, entry] : manifest["edge_types"].items()) {
    CHECK(std::filesystem::exists(dir.path() / entry["file"].get<std::string>()));
  }
}

TEST_CASE("corrupted FK codes are reported") {
  auto db = writes_fixture();
  // poison one dummy code beyond the key space
  db.table("Writes").column("paper_writer").cells[0] = std::int64_t{999};
  CHECK_THROWS_AS(build_graph(db, BuildMode::kRow2NodeEdge), IoError);
}
