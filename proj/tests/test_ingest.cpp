#include "doctest.h"

#include <cmath>

#include "autog/profile.hpp"
#include "autog/table_io.hpp"
#include "autog/util.hpp"
#include "test_support.hpp"

using namespace autog;
using autog::testing::TempDir;

namespace {

TableDef simple_def(const std::string& name, const std::string& source, TableFormat format,
                    std::vector<ColumnDef> columns) {
  TableDef def;
  def.name = name;
  def.source = source;
  def.format = format;
  def.columns = std::move(columns);
  return def;
}

Column int_column(std::initializer_list<std::int64_t> values) {
  Column column;
  for (const auto v : values) column.cells.push_back(v);
  return column;
}

}  // namespace

TEST_CASE("CSV load with declared columns") {
  TempDir dir("csv");
  autog::testing::write_file(dir.path() / "t.csv", "id,tag\n1,a\n2,b\n3,a\n");
  const auto def = simple_def("T", (dir.path() / "t.csv").string(), TableFormat::kCsv,
                              {ColumnDef{"id", DataType::kPrimaryKey, {}, {}},
                               ColumnDef{"tag", DataType::kCategory, {}, {}}});
  const auto loaded = load_table(def);
  CHECK(loaded.data.row_count == 3);
  CHECK(loaded.warnings.empty());
  CHECK(std::get<std::int64_t>(loaded.data.column("id").cells[0]) == 1);
  CHECK(std::get<std::string>(loaded.data.column("tag").cells[2]) == "a");
}

TEST_CASE("missing declared column raises a named error") {
  TempDir dir("missing");
  autog::testing::write_file(dir.path() / "t.csv", "id\n1\n");
  const auto def = simple_def("History", (dir.path() / "t.csv").string(), TableFormat::kCsv,
                              {ColumnDef{"id", DataType::kPrimaryKey, {}, {}},
                               ColumnDef{"repeater", DataType::kCategory, {}, {}}});
  CHECK_THROWS_WITH_AS(load_table(def), doctest::Contains("repeater"), IoError);
  CHECK_THROWS_WITH_AS(load_table(def), doctest::Contains("History"), IoError);
}

TEST_CASE("undeclared file columns become warnings") {
  TempDir dir("warn");
  autog::testing::write_file(dir.path() / "t.csv", "id,extra\n1,x\n");
  const auto def = simple_def("T", (dir.path() / "t.csv").string(), TableFormat::kCsv,
                              {ColumnDef{"id", DataType::kPrimaryKey, {}, {}}});
  const auto loaded = load_table(def);
  REQUIRE(loaded.warnings.size() == 1);
  CHECK(loaded.warnings[0].find("extra") != std::string::npos);
  CHECK_FALSE(loaded.data.has_column("extra"));
}

TEST_CASE("missing file raises IoError") {
  const auto def = simple_def("T", "/nonexistent/nowhere.csv", TableFormat::kCsv,
                              {ColumnDef{"id", DataType::kPrimaryKey, {}, {}}});
  CHECK_THROWS_AS(load_table(def), IoError);
}

TEST_CASE("CSV quoting round-trips") {
  const auto parsed = parse_csv("a,b\n\"x,y\",\"with \"\"quotes\"\"\"\n\"line\nbreak\",plain\n");
  CHECK(parsed.row_count == 2);
  CHECK(std::get<std::string>(parsed.columns[0].cells[0]) == "x,y");
  CHECK(std::get<std::string>(parsed.columns[1].cells[0]) == "with \"quotes\"");
  CHECK(std::get<std::string>(parsed.columns[0].cells[1]) == "line\nbreak");
}

TEST_CASE("multi-category CSV cells parse as JSON arrays") {
  const auto parsed = parse_csv("id,tags\n1,\"[\"\"a\"\",\"\"b\"\"]\"\n2,[]\n");
  REQUIRE(parsed.row_count == 2);
  const auto& cell = parsed.columns[1].cells[0];
  REQUIRE(is_list(cell));
  CHECK(std::get<std::vector<Scalar>>(cell).size() == 2);
  CHECK(std::get<std::vector<Scalar>>(parsed.columns[1].cells[1]).empty());
}

TEST_CASE("npz round trip: ints, reals with NaN, strings, tensors") {
  TempDir dir("npz");
  TableData table;
  table.table_name = "T";
  table.row_count = 4;
  Column ints, reals, strings, tensors;
  for (std::int64_t i = 0; i < 4; ++i) ints.cells.push_back(i * 7);
  reals.cells = {Cell{1.5}, Cell{}, Cell{2.25}, Cell{-3.0}};
  strings.cells = {Cell{std::string("alpha")}, Cell{std::string("b")}, Cell{std::string("")},
                   Cell{std::string("delta")}};
  for (int i = 0; i < 4; ++i) {
    tensors.cells.push_back(std::vector<double>{0.1 * i, 0.2 * i, 0.3 * i});
  }
  table.add_column("ints", std::move(ints));
  table.add_column("reals", std::move(reals));
  table.add_column("strings", std::move(strings));
  table.add_column("feat", std::move(tensors));
  const auto path = (dir.path() / "t.npz").string();
  write_npz(path, table);

  const auto loaded = read_npz(path);
  REQUIRE(loaded.row_count == 4);
  CHECK(std::get<std::int64_t>(loaded.columns[0].cells[3]) == 21);
  CHECK(is_null(loaded.columns[1].cells[1]));
  CHECK(std::get<double>(loaded.columns[1].cells[2]) == 2.25);
  CHECK(std::get<std::string>(loaded.columns[2].cells[0]) == "alpha");
  REQUIRE(is_tensor(loaded.columns[3].cells[2]));
  CHECK(std::get<std::vector<double>>(loaded.columns[3].cells[2])[1] == doctest::Approx(0.4));
}

TEST_CASE("parquet round trip with a list-typed column") {
  TempDir dir("pq");
  TableData table;
  table.table_name = "T";
  table.row_count = 5;
  Column ids, tags, score;
  for (std::int64_t i = 0; i < 5; ++i) ids.cells.push_back(i);
  tags.cells.push_back(std::vector<Scalar>{std::string("a"), std::string("b")});
  tags.cells.push_back(std::vector<Scalar>{std::string("b")});
  tags.cells.push_back(std::vector<Scalar>{});
  tags.cells.push_back(std::vector<Scalar>{std::string("c"), std::string("a"), std::string("d")});
  tags.cells.push_back(std::vector<Scalar>{std::string("e")});
  score.cells = {Cell{0.5}, Cell{}, Cell{1.5}, Cell{2.0}, Cell{-1.0}};
  table.add_column("id", std::move(ids));
  table.add_column("tags", std::move(tags));
  table.add_column("score", std::move(score));
  const auto path = (dir.path() / "t.pqt").string();
  write_parquet(path, table);

  const auto loaded = read_parquet(path);
  REQUIRE(loaded.row_count == 5);
  REQUIRE(is_list(loaded.columns[1].cells[0]));
  CHECK(std::get<std::vector<Scalar>>(loaded.columns[1].cells[0]).size() == 2);
  CHECK(std::get<std::vector<Scalar>>(loaded.columns[1].cells[2]).empty());
  CHECK(std::get<std::vector<Scalar>>(loaded.columns[1].cells[3]).size() == 3);
  CHECK(is_null(loaded.columns[2].cells[1]));
  CHECK(std::get<double>(loaded.columns[2].cells[4]) == -1.0);

  // schema-driven load sees the same shapes
  const auto def = simple_def("T", path, TableFormat::kParquet,
                              {ColumnDef{"id", DataType::kPrimaryKey, {}, {}},
                               ColumnDef{"tags", DataType::kMultiCategory, {}, {}},
                               ColumnDef{"score", DataType::kNumeric, {}, {}}});
  const auto typed = load_table(def);
  REQUIRE(is_list(typed.data.column("tags").cells[3]));
  CHECK(std::get<std::vector<Scalar>>(typed.data.column("tags").cells[3]).size() == 3);
}

TEST_CASE("profile: constant column") {
  const auto profile = profile_column(int_column({7, 7, 7}), 5, 1);
  CHECK(profile.total == 3);
  CHECK(profile.uniques == 1);
  CHECK(scalar_to_string(profile.mode) == "7");
  CHECK(profile.samples.size() == 3);
}

TEST_CASE("profile: MAG-scale dense id column") {
  Column ids;
  ids.cells.reserve(736389);
  for (std::int64_t i = 0; i < 736389; ++i) ids.cells.push_back(i);
  const auto profile = profile_column(ids, 5, 0);
  CHECK(profile.total == 736389);
  CHECK(profile.uniques == 736389);
  CHECK(scalar_to_string(*profile.min) == "0");
  CHECK(scalar_to_string(*profile.max) == "736388");
  CHECK(profile.samples.size() == 5);
}

TEST_CASE("profile: Writes-scale author id column") {
  Column ids;
  ids.cells.reserve(1134649);
  for (std::int64_t i = 0; i < 1134649; ++i) ids.cells.push_back(i);
  const auto profile = profile_column(ids, 5, 0);
  CHECK(profile.uniques == 1134649);
  CHECK(scalar_to_string(*profile.max) == "1134648");
}

TEST_CASE("profile: empty column") {
  const auto profile = profile_column(Column{}, 5, 0);
  CHECK(profile.total == 0);
  CHECK(profile.uniques == 0);
  CHECK(profile.samples.empty());
  CHECK_FALSE(profile.min.has_value());
}

TEST_CASE("profile: NaN cells excluded from uniques, counted separately") {
  Column column;
  column.cells = {Cell{std::int64_t{1}}, Cell{}, Cell{std::int64_t{1}}, Cell{}};
  const auto profile = profile_column(column, 5, 0);
  CHECK(profile.total == 4);
  CHECK(profile.uniques == 1);
  CHECK(profile.nan_count == 2);
}

TEST_CASE("profile: permutation invariance of order statistics") {
  std::mt19937_64 rng(3);
  Column column;
  for (int i = 0; i < 200; ++i) {
    column.cells.push_back(static_cast<std::int64_t>(bounded_uint(rng, 50)));
  }
  // make the mode unique so it is permutation-stable
  for (int i = 0; i < 10; ++i) column.cells.push_back(std::int64_t{7});
  auto shuffled = column;
  shuffle_inplace(shuffled.cells, rng);
  const auto a = profile_column(column, 5, 9);
  const auto b = profile_column(shuffled, 5, 9);
  CHECK(a.total == b.total);
  CHECK(a.uniques == b.uniques);
  CHECK(scalar_eq(*a.min, *b.min));
  CHECK(scalar_eq(*a.max, *b.max));
  CHECK(scalar_eq(a.mode, b.mode));
}

TEST_CASE("profile: mode tie broken by first occurrence") {
  Column column;
  column.cells = {Cell{std::string("b")}, Cell{std::string("a")}, Cell{std::string("a")},
                  Cell{std::string("b")}};
  const auto profile = profile_column(column, 5, 0);
  CHECK(scalar_to_string(profile.mode) == "b");
}

TEST_CASE("infer: dense unique ints are a primary key candidate") {
  Column ids;
  for (std::int64_t i = 0; i < 500; ++i) ids.cells.push_back(i);
  std::map<std::string, ColumnProfile> profiles{{"paperID", profile_column(ids, 5, 0)}};
  const auto guesses = infer_types(profiles);
  CHECK(guesses.at("paperID").dtype == DataType::kPrimaryKey);
}

TEST_CASE("infer: year-like ints are category, not timestamp") {
  std::mt19937_64 rng(5);
  Column years;
  for (int i = 0; i < 2000; ++i) {
    years.cells.push_back(static_cast<std::int64_t>(2010 + bounded_uint(rng, 10)));
  }
  std::map<std::string, ColumnProfile> profiles{{"year", profile_column(years, 5, 0)}};
  const auto guess = infer_types(profiles).at("year");
  CHECK(guess.dtype == DataType::kCategory);
}

TEST_CASE("infer: full datetimes are timestamps") {
  Column dates;
  for (int i = 0; i < 60; ++i) {
    dates.cells.push_back("2021-03-" + std::to_string(10 + i % 19) + " 12:00:00");
  }
  std::map<std::string, ColumnProfile> profiles{{"when", profile_column(dates, 5, 0)}};
  CHECK(infer_types(profiles).at("when").dtype == DataType::kTimestamp);
}

TEST_CASE("infer: wide numeric vectors are embeddings; never foreign keys") {
  Column feat;
  for (int i = 0; i < 10; ++i) {
    feat.cells.push_back(std::vector<double>(64, 0.5 * i));
  }
  std::map<std::string, ColumnProfile> profiles{{"feat", profile_column(feat, 5, 0)}};
  const auto guesses = infer_types(profiles);
  CHECK(guesses.at("feat").dtype == DataType::kEmbedding);
  for (const auto& [name, guess] : guesses) {
    CHECK(guess.dtype != DataType::kForeignKey);
  }
}

TEST_CASE("stats report renders the fixed layout") {
  DatasetSchema schema;
  schema.dataset_name = "mag";
  TableDef paper;
  paper.name = "paper";
  paper.source = "p.npz";
  paper.format = TableFormat::kNpz;
  paper.columns = {ColumnDef{"paperID", DataType::kPrimaryKey, {}, {}},
                   ColumnDef{"feat", DataType::kEmbedding, {}, {}}};
  schema.tables.push_back(paper);

  TableData data;
  data.table_name = "paper";
  data.row_count = 736389;
  Column ids, feat;
  for (std::int64_t i = 0; i < 736389; ++i) ids.cells.push_back(i);
  feat.cells.push_back(std::vector<double>{0.0, 1.0});
  for (int i = 1; i < 736389; ++i) feat.cells.push_back(std::vector<double>{0.5, 0.5});
  data.add_column("paperID", std::move(ids));
  data.add_column("feat", std::move(feat));

  std::map<std::string, TableData> payload;
  payload.emplace("paper", std::move(data));
  const auto profiles = profile_dataset(schema, payload, 5, 0);
  const auto report = render_stats_report(schema, profiles);

  CHECK(autog::starts_with(report, "Analysis for Table paper:\n"));
  CHECK(report.find("    Max: 736388\n") != std::string::npos);
  CHECK(report.find("    Min: 0\n") != std::string::npos);
  CHECK(report.find("    Number of Unique Values: 736389\n") != std::string::npos);
  CHECK(report.find("Column is multi-dimensional. Probably an embedding type. Usually not of "
                    "interest\n") != std::string::npos);
}

TEST_CASE("stats report: empty dataset renders empty") {
  DatasetSchema schema;
  schema.dataset_name = "none";
  CHECK(render_stats_report(schema, {}) == "");
}

TEST_CASE("report rendering is deterministic under a fixed seed") {
  std::mt19937_64 rng(17);
  const auto db = autog::testing::gen_database(rng);
  const auto p1 = profile_dataset(db.schema, db.tables, 5, 123);
  const auto p2 = profile_dataset(db.schema, db.tables, 5, 123);
  CHECK(render_stats_report(db.schema, p1) == render_stats_report(db.schema, p2));
}
