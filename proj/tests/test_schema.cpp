#include "doctest.h"

#include "autog/schema.hpp"
#include "autog/util.hpp"
#include "test_support.hpp"

using namespace autog;

namespace {

const char* kAvsSnippet = R"(dataset_name: avs
tables:
  - name: History
    source: data/history.pqt
    format: parquet
    columns:
      - name: chain
        dtype: category
      - name: market
        dtype: category
      - name: offerdate
        dtype: datetime
      - name: id
        dtype: primary_key
      - name: repeater
        dtype: category
      - name: offer
        dtype: foreign_key
        link_to: Offer.offer
    time_column: offerdate
)";

}  // namespace

TEST_CASE("parse AVS snippet collects the Offer dummy") {
  const auto schema = parse_schema(kAvsSnippet);
  CHECK(schema.dataset_name == "avs");
  REQUIRE(schema.tables.size() == 1);
  const auto& history = schema.tables[0];
  CHECK(history.name == "History");
  CHECK(history.format == TableFormat::kParquet);
  CHECK(history.columns.size() == 6);
  CHECK(history.time_column == "offerdate");
  REQUIRE(schema.derived.size() == 1);
  CHECK(schema.derived[0].name == "Offer");
  CHECK(schema.derived[0].key_column == "offer");
  CHECK(validate_schema(schema).empty());
}

TEST_CASE("empty tables list parses to an empty schema") {
  const auto schema = parse_schema("dataset_name: empty\ntables: []\n");
  CHECK(schema.tables.empty());
  CHECK(schema.derived.empty());
}

TEST_CASE("dtype aliases normalize and re-emit canonically") {
  const auto schema = parse_schema(
      "dataset_name: d\n"
      "tables:\n"
      "  - name: T\n"
      "    source: t.csv\n"
      "    format: csv\n"
      "    columns:\n"
      "      - name: a\n"
      "        dtype: float\n"
      "      - name: b\n"
      "        dtype: numeric\n"
      "      - name: c\n"
      "        dtype: set\n"
      "      - name: d\n"
      "        dtype: timestamp\n");
  CHECK(schema.tables[0].columns[0].dtype == DataType::kNumeric);
  CHECK(schema.tables[0].columns[1].dtype == DataType::kNumeric);
  CHECK(schema.tables[0].columns[2].dtype == DataType::kMultiCategory);
  CHECK(schema.tables[0].columns[3].dtype == DataType::kTimestamp);
  const auto out = serialize_schema(schema);
  CHECK(out.find("dtype: float") != std::string::npos);
  CHECK(out.find("dtype: multi_category") != std::string::npos);
  CHECK(out.find("dtype: datetime") != std::string::npos);
  CHECK(out.find("dtype: numeric") == std::string::npos);
}

TEST_CASE("AVS snippet is a serialization fixed point") {
  const auto schema = parse_schema(kAvsSnippet);
  const auto emitted = serialize_schema(schema);
  CHECK(emitted == kAvsSnippet);
  CHECK(serialize_schema(parse_schema(emitted)) == emitted);
}

TEST_CASE("dummies are never emitted as table blocks") {
  const auto schema = parse_schema(kAvsSnippet);
  const auto emitted = serialize_schema(schema);
  CHECK(emitted.find("name: Offer") == std::string::npos);
}

TEST_CASE("parse errors carry positions and reasons") {
  CHECK_THROWS_AS(parse_schema("dataset_name: [unclosed\ntables: []"), ParseError);
  CHECK_THROWS_WITH_AS(
      parse_schema("dataset_name: d\ntables:\n  - name: T\n    source: s\n    format: csv\n"
                   "    columns:\n      - name: a\n        dtype: wobble\n"),
      doctest::Contains("unknown dtype"), ParseError);
  CHECK_THROWS_WITH_AS(
      parse_schema("dataset_name: d\ntables:\n  - name: T\n    source: s\n    format: csv\n"
                   "    columns:\n      - name: a\n        dtype: category\n"
                   "      - name: a\n        dtype: category\n"),
      doctest::Contains("duplicate column"), ParseError);
  CHECK_THROWS_WITH_AS(
      parse_schema("dataset_name: d\ntables:\n  - name: T\n    source: s\n    format: csv\n"
                   "    columns:\n      - name: a\n        dtype: category\n"
                   "        link_to: X.y\n"),
      doctest::Contains("non-foreign-key"), ParseError);
  CHECK_THROWS_WITH_AS(
      parse_schema("dataset_name: d\ntables:\n  - name: bad-name\n    source: s\n"
                   "    format: csv\n    columns:\n      - name: a\n        dtype: category\n"),
      doctest::Contains("identifier"), ParseError);
}

TEST_CASE("validate flags double primary keys") {
  DatasetSchema schema;
  schema.dataset_name = "d";
  TableDef table;
  table.name = "T";
  table.source = "t.csv";
  table.columns = {ColumnDef{"a", DataType::kPrimaryKey, {}, {}},
                   ColumnDef{"b", DataType::kPrimaryKey, {}, {}}};
  schema.tables.push_back(table);
  const auto violations = validate_schema(schema);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].rule == "single-pk");
}

TEST_CASE("validate flags dangling links when dummies are frozen") {
  DatasetSchema schema;
  schema.dataset_name = "d";
  TableDef table;
  table.name = "T";
  table.source = "t.csv";
  table.columns = {ColumnDef{"a", DataType::kForeignKey, std::string("Ghost.id"), {}}};
  schema.tables.push_back(table);
  const auto resolved = resolve_links(schema, /*frozen_dummies=*/true);
  bool found = false;
  for (const auto& violation : validate_schema(resolved)) {
    if (violation.rule == "dangling-link") found = true;
  }
  CHECK(found);
}

TEST_CASE("resolve_links rejects links to non-PK columns of declared tables") {
  DatasetSchema schema;
  schema.dataset_name = "d";
  TableDef journal;
  journal.name = "Journal";
  journal.source = "j.csv";
  journal.columns = {ColumnDef{"JournalID", DataType::kPrimaryKey, {}, {}},
                     ColumnDef{"Name", DataType::kText, {}, {}}};
  TableDef paper;
  paper.name = "Paper";
  paper.source = "p.csv";
  paper.columns = {ColumnDef{"PaperID", DataType::kPrimaryKey, {}, {}},
                   ColumnDef{"J", DataType::kForeignKey, std::string("Journal.Name"), {}}};
  schema.tables = {journal, paper};
  CHECK_THROWS_WITH_AS(resolve_links(schema), doctest::Contains("connect_two_columns"),
                       ParseError);
}

TEST_CASE("two links to one dummy share a key space") {
  const auto schema = parse_schema(
      "dataset_name: d\n"
      "tables:\n"
      "  - name: A\n"
      "    source: a.csv\n"
      "    format: csv\n"
      "    columns:\n"
      "      - name: nation\n"
      "        dtype: foreign_key\n"
      "        link_to: Country.CountryID\n"
      "  - name: B\n"
      "    source: b.csv\n"
      "    format: csv\n"
      "    columns:\n"
      "      - name: land\n"
      "        dtype: foreign_key\n"
      "        link_to: Country.CountryID\n");
  REQUIRE(schema.derived.size() == 1);
  CHECK(schema.derived[0].name == "Country");
  CHECK(validate_schema(schema).empty());
}

TEST_CASE("round trip and canonical idempotence on random schemas") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 50; ++i) {
    const auto db = autog::testing::gen_database(rng);
    CHECK(validate_schema(db.schema).empty());
    const auto text = serialize_schema(db.schema);
    const auto reparsed = parse_schema(text);
    CHECK(reparsed == db.schema);
    CHECK(serialize_schema(reparsed) == text);
  }
}

TEST_CASE("field construction order does not affect serialization") {
  TableDef t1;
  t1.name = "T";
  t1.source = "t.csv";
  t1.format = TableFormat::kCsv;
  t1.columns.push_back(ColumnDef{"a", DataType::kCategory, {}, {}});
  t1.columns.push_back(ColumnDef{"b", DataType::kNumeric, {}, {}});

  TableDef t2;
  t2.columns.push_back(ColumnDef{"a", DataType::kCategory, {}, {}});
  t2.columns.push_back(ColumnDef{"b", DataType::kNumeric, {}, {}});
  t2.format = TableFormat::kCsv;
  t2.source = "t.csv";
  t2.name = "T";

  DatasetSchema s1{"d", {t1}, {}};
  DatasetSchema s2{"d", {t2}, {}};
  CHECK(serialize_schema(s1) == serialize_schema(s2));
}

TEST_CASE("empty tables are rejected at validate time") {
  DatasetSchema schema;
  schema.dataset_name = "d";
  TableDef table;
  table.name = "T";
  table.source = "t.csv";
  schema.tables.push_back(table);
  bool found = false;
  for (const auto& violation : validate_schema(schema)) {
    if (violation.rule == "empty-table") found = true;
  }
  CHECK(found);
}
