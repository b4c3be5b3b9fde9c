#include "doctest.h"

#include "autog/join_discovery.hpp"
#include "autog/util.hpp"
#include "test_support.hpp"

using namespace autog;

namespace {

ColumnProfile profile_of(std::initializer_list<const char*> samples) {
  Column column;
  for (const auto* s : samples) column.cells.push_back(std::string(s));
  return profile_column(column, 5, 0);
}

Column strings(std::initializer_list<const char*> values) {
  Column column;
  for (const auto* v : values) column.cells.push_back(std::string(v));
  return column;
}

Column ints(std::initializer_list<std::int64_t> values) {
  Column column;
  for (const auto v : values) column.cells.push_back(v);
  return column;
}

}  // namespace

TEST_CASE("column serialization follows the fixed template") {
  ColumnProfile profile;
  profile.total = 5;
  profile.uniques = 5;
  profile.samples = {Scalar{std::string("Nature")}, Scalar{std::string("Science")},
                     Scalar{std::string("NeurIPS")}, Scalar{std::string("ICML")},
                     Scalar{std::string("CVPR")}};
  const auto text = serialize_column_for_embedding({"Journal", "Name"}, profile);
  CHECK(text == "Journal.Name category values: Nature, Science, NeurIPS, ICML, CVPR");
}

TEST_CASE("empty column serialization mentions no samples") {
  ColumnProfile profile;
  const auto text = serialize_column_for_embedding({"T", "c"}, profile);
  CHECK(text.find("no samples") != std::string::npos);
}

TEST_CASE("serialization is deterministic") {
  const auto profile = profile_of({"a", "b", "c"});
  CHECK(serialize_column_for_embedding({"T", "c"}, profile) ==
        serialize_column_for_embedding({"T", "c"}, profile));
}

TEST_CASE("trigram embedder: identical and disjoint texts") {
  TrigramEmbedder embedder;
  const auto a = embedder.embed("paper_cite shared ids 1 2 3");
  const auto b = embedder.embed("paper_cite shared ids 1 2 3");
  CHECK(cosine(a, b) == doctest::Approx(1.0));
  const auto c = embedder.embed("zzzqqqxxx");
  const auto d = embedder.embed("aaabbbccc");
  CHECK(cosine(c, d) == doctest::Approx(0.0));
}

TEST_CASE("near-identical serializations embed close together") {
  TrigramEmbedder embedder;
  ColumnProfile pa;
  pa.samples = {Scalar{std::int64_t{5718}}, Scalar{std::int64_t{2237}},
                Scalar{std::int64_t{7110}}, Scalar{std::int64_t{2607}},
                Scalar{std::int64_t{3529}}};
  pa.total = pa.uniques = 5;
  ColumnProfile pb = pa;
  const auto a = embedder.embed(serialize_column_for_embedding({"Cites", "paper_cite"}, pa));
  const auto b = embedder.embed(serialize_column_for_embedding({"Cites", "paper_cited"}, pb));
  // Lexical similarity is a noisy prior: different columns, near-identical text.
  CHECK(cosine(a, b) > 0.8);
}

TEST_CASE("overlap score: hand-counted containment") {
  CHECK(overlap_score(ints({1, 2, 3}), ints({2, 3, 4})) == doctest::Approx(2.0 / 3.0));
  CHECK(overlap_score(ints({1, 2}), ints({1, 2, 3, 4})) == doctest::Approx(1.0));
  CHECK(overlap_score(ints({1, 2}), ints({7, 8})) == doctest::Approx(0.0));
  CHECK(overlap_score(Column{}, ints({1})) == doctest::Approx(0.0));
  // symmetry
  CHECK(overlap_score(ints({2, 3, 4}), ints({1, 2, 3})) ==
        overlap_score(ints({1, 2, 3}), ints({2, 3, 4})));
}

TEST_CASE("rank_pairs renders the exact report line format") {
  DatasetSchema schema;
  schema.dataset_name = "Papers";
  TableDef paper;
  paper.name = "Paper";
  paper.source = "p.csv";
  paper.columns = {ColumnDef{"PaperID", DataType::kPrimaryKey, {}, {}},
                   ColumnDef{"Journal", DataType::kCategory, {}, {}}};
  TableDef journal;
  journal.name = "Journal";
  journal.source = "j.csv";
  journal.columns = {ColumnDef{"JournalID", DataType::kPrimaryKey, {}, {}},
                     ColumnDef{"Name", DataType::kText, {}, {}}};
  schema.tables = {paper, journal};

  std::map<std::string, TableData> data;
  TableData paper_data;
  paper_data.table_name = "Paper";
  paper_data.row_count = 5;
  paper_data.add_column("PaperID", ints({0, 1, 2, 3, 4}));
  paper_data.add_column("Journal", strings({"Nature", "Science", "Nature", "ICML", "CVPR"}));
  data.emplace("Paper", std::move(paper_data));
  TableData journal_data;
  journal_data.table_name = "Journal";
  journal_data.row_count = 5;
  journal_data.add_column("JournalID", ints({0, 1, 2, 3, 4}));
  journal_data.add_column("Name", strings({"Nature", "Science", "NeurIPS", "ICML", "CVPR"}));
  data.emplace("Journal", std::move(journal_data));

  const auto profiles = profile_dataset(schema, data, 5, 0);
  const auto ranked = rank_pairs(schema, profiles, &data, SimilarityMethod::kEmbedding, 20);

  REQUIRE_FALSE(ranked.pairs.empty());
  // The best pair is Paper.Journal vs Journal.Name, rendered in schema order.
  CHECK(ranked.pairs[0].a.table == "Paper");
  CHECK(ranked.pairs[0].a.column == "Journal");
  CHECK(ranked.pairs[0].b.table == "Journal");
  CHECK(ranked.pairs[0].b.column == "Name");
  const auto first_line = ranked.report.substr(0, ranked.report.find('\n'));
  CHECK(autog::starts_with(first_line,
                           "The pair with the 1st highest similarity is column \"Journal\" from "
                           "Table \"Paper\" and column \"Name\" from Table \"Journal\" with "
                           "similarity "));
  // three decimals
  const auto score_text = first_line.substr(first_line.rfind(' ') + 1);
  CHECK(score_text.size() == 5);
  CHECK(score_text[1] == '.');

  // report parsing round-trips
  const auto reparsed = parse_similarity_report(ranked.report);
  REQUIRE(reparsed.size() == ranked.pairs.size());
  for (std::size_t i = 0; i < reparsed.size(); ++i) {
    CHECK(reparsed[i].a == ranked.pairs[i].a);
    CHECK(reparsed[i].b == ranked.pairs[i].b);
    CHECK(reparsed[i].score ==
          doctest::Approx(ranked.pairs[i].score).epsilon(0.001));
  }
}

TEST_CASE("rank_pairs with top_n 0 renders an empty report") {
  DatasetSchema schema;
  schema.dataset_name = "d";
  const auto ranked = rank_pairs(schema, {}, nullptr, SimilarityMethod::kEmbedding, 0);
  CHECK(ranked.report.empty());
  CHECK(ranked.pairs.empty());
}

TEST_CASE("overlap ranking puts higher-overlap pair first") {
  // citation ids overlap more than author ids, by construction
  DatasetSchema schema;
  schema.dataset_name = "mag";
  TableDef cites;
  cites.name = "Cites";
  cites.source = "c.csv";
  cites.columns = {ColumnDef{"paper_cite", DataType::kCategory, {}, {}},
                   ColumnDef{"paper_cited", DataType::kCategory, {}, {}}};
  TableDef writes;
  writes.name = "Writes";
  writes.source = "w.csv";
  writes.columns = {ColumnDef{"paper_writer", DataType::kCategory, {}, {}}};
  schema.tables = {cites, writes};

  std::map<std::string, TableData> data;
  TableData cites_data;
  cites_data.table_name = "Cites";
  cites_data.row_count = 6;
  cites_data.add_column("paper_cite", ints({1, 2, 3, 4, 5, 6}));
  cites_data.add_column("paper_cited", ints({1, 2, 3, 4, 9, 10}));
  data.emplace("Cites", std::move(cites_data));
  TableData writes_data;
  writes_data.table_name = "Writes";
  writes_data.row_count = 6;
  writes_data.add_column("paper_writer", ints({100, 101, 102, 1, 2, 103}));
  data.emplace("Writes", std::move(writes_data));

  // brute-force expectation: |{1..6} ∩ {1,2,3,4,9,10}| / 6 = 4/6;
  // |{1..6} ∩ {100,101,102,1,2,103}| / 6 = 2/6
  const auto profiles = profile_dataset(schema, data, 5, 0);
  const auto ranked = rank_pairs(schema, profiles, &data, SimilarityMethod::kOverlap, 20);
  REQUIRE(ranked.pairs.size() >= 2);
  CHECK(ranked.pairs[0].a.column == "paper_cite");
  CHECK(ranked.pairs[0].b.column == "paper_cited");
  CHECK(ranked.pairs[0].score == doctest::Approx(4.0 / 6.0));
}

TEST_CASE("scores stay in [0,1] and ranking is deterministic") {
  std::mt19937_64 rng(23);
  const auto db = autog::testing::gen_database(rng);
  const auto profiles = profile_dataset(db.schema, db.tables, 5, 0);
  const auto a = rank_pairs(db.schema, profiles, &db.tables, SimilarityMethod::kEmbedding, 50);
  const auto b = rank_pairs(db.schema, profiles, &db.tables, SimilarityMethod::kEmbedding, 50);
  CHECK(a.report == b.report);
  for (const auto& pair : a.pairs) {
    CHECK(pair.score >= 0.0);
    CHECK(pair.score <= 1.0);
  }
}

TEST_CASE("wire embedder speaks the NDJSON protocol") {
  const char* script =
      "import sys, json\n"
      "for line in sys.stdin:\n"
      "    req = json.loads(line)\n"
      "    vec = [float(len(req['text'])), 1.0, 0.0]\n"
      "    print(json.dumps({'id': req['id'], 'vector': vec}), flush=True)\n";
  autog::testing::TempDir dir("wire");
  const auto path = autog::testing::write_file(dir.path() / "embed.py", script);
  WireEmbedder embedder({"python3", path});
  const auto v1 = embedder.embed("abc");
  const auto v2 = embedder.embed("abcdef");
  REQUIRE(v1.size() == 3);
  // unit norm
  CHECK(v1[0] * v1[0] + v1[1] * v1[1] + v1[2] * v1[2] == doctest::Approx(1.0));
  CHECK(v2[0] > v2[1]);
}
