#include "autog/corpus.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "autog/table_io.hpp"
#include "autog/util.hpp"

#ifndef AUTOG_FIXTURES_DIR
#define AUTOG_FIXTURES_DIR ""
#endif

namespace autog::corpus {

namespace fs = std::filesystem;

namespace {

std::string fixtures_root() {
  if (const char* env = std::getenv("AUTOG_FIXTURES")) return env;
  return AUTOG_FIXTURES_DIR;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("fixture file missing: '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write fixture file '" + path.string() + "'");
  out << content;
}

/// The assistant side of the worked example: reasoning plus selection block,
/// sliced from the single source of truth in cot_example().
std::string cot_completion() {
  const auto& example = cot_example();
  const auto at = example.find("We need to think about");
  return example.substr(at);
}

void write_transcript(const fs::path& path) {
  // Draft and reflection return the same payload; second turn terminates.
  std::ostringstream out;
  const std::string completion = cot_completion();
  nlohmann::ordered_json line;
  line = {{"turn", 0}, {"role", "assistant"}, {"content", completion}};
  out << line.dump() << "\n";
  line = {{"turn", 0}, {"role", "assistant"}, {"content", completion}};
  out << line.dump() << "\n";
  line = {{"turn", 1}, {"role", "assistant"}, {"content", "<selection>None</selection>"}};
  out << line.dump() << "\n";
  line = {{"turn", 1}, {"role", "assistant"}, {"content", "<selection>None</selection>"}};
  out << line.dump() << "\n";
  write_file(path, out.str());
}

// Paper/Journal payload at 100-row scale: journal names function-determine
// JournalID, paper journals draw from the journal name pool, categories are
// small integers like the published stats block.
void write_cot_payload(const fs::path& root) {
  std::mt19937_64 rng(7);
  const std::vector<std::string> journals = {"Nature", "Science", "NeurIPS", "ICML", "CVPR",
                                             "ICLR",   "AAAI",    "KDD",     "TPAMI", "JMLR"};
  const std::vector<std::string> countries = {"USA", "UK", "Canada"};
  const std::vector<std::string> publishers = {"Springer", "Elsevier", "ACM"};
  const std::vector<std::string> locations = {"USA", "UK"};
  const std::vector<std::string> keywords = {
      "Machine Learning", "Deep Learning",  "Graph Neural Networks", "Reinforcement Learning",
      "Meta Learning",    "Computer Vision", "Optimization",          "Transformers",
      "Generative Models", "Causal Inference"};

  TableData journal;
  journal.table_name = "Journal";
  journal.row_count = journals.size();
  {
    Column id, name, impact, country;
    for (std::size_t j = 0; j < journals.size(); ++j) {
      id.cells.push_back(static_cast<std::int64_t>(j));
      name.cells.push_back(journals[j]);
      impact.cells.push_back(1.0 + static_cast<double>(bounded_uint(rng, 90)) / 10.0);
      country.cells.push_back(countries[bounded_uint(rng, countries.size())]);
    }
    journal.add_column("JournalID", std::move(id));
    journal.add_column("Name", std::move(name));
    journal.add_column("ImpactFactor", std::move(impact));
    journal.add_column("Country", std::move(country));
  }
  write_csv((root / "journal.csv").string(), journal);

  const std::size_t n_papers = 100;
  TableData paper;
  paper.table_name = "Paper";
  paper.row_count = n_papers;
  {
    Column id, title, author, journal_col, year, keyword, abstract, category, publisher, location;
    for (std::size_t p = 0; p < n_papers; ++p) {
      id.cells.push_back(static_cast<std::int64_t>(p));
      title.cells.push_back("A Study of Topic " + std::to_string(p));
      std::vector<Scalar> authors;
      const std::size_t count = 1 + bounded_uint(rng, 3);
      for (std::size_t k = 0; k < count; ++k) {
        authors.push_back("Author_" + std::to_string(bounded_uint(rng, 30)));
      }
      author.cells.emplace_back(std::move(authors));
      journal_col.cells.push_back(journals[bounded_uint(rng, journals.size())]);
      year.cells.push_back(2010.0 + static_cast<double>(bounded_uint(rng, 10)));
      keyword.cells.push_back(keywords[bounded_uint(rng, keywords.size())]);
      abstract.cells.push_back("This paper presents a new model for case " + std::to_string(p) +
                               ".");
      category.cells.push_back(static_cast<std::int64_t>(bounded_uint(rng, 4)));
      publisher.cells.push_back(publishers[bounded_uint(rng, publishers.size())]);
      location.cells.push_back(locations[bounded_uint(rng, locations.size())]);
    }
    paper.add_column("PaperID", std::move(id));
    paper.add_column("Title", std::move(title));
    paper.add_column("Author", std::move(author));
    paper.add_column("Journal", std::move(journal_col));
    paper.add_column("Year", std::move(year));
    paper.add_column("Keyword", std::move(keyword));
    paper.add_column("Abstract", std::move(abstract));
    paper.add_column("Category", std::move(category));
    paper.add_column("Publisher", std::move(publisher));
    paper.add_column("PublisherLocation", std::move(location));
  }
  write_csv((root / "paper.csv").string(), paper);
}

void write_avs_payload(const fs::path& root) {
  fs::create_directories(root / "data");
  std::mt19937_64 rng(11);
  TableData history;
  history.table_name = "History";
  history.row_count = 12;
  Column chain, market, offerdate, id, repeater, offer;
  for (std::size_t r = 0; r < 12; ++r) {
    chain.cells.push_back("chain_" + std::to_string(bounded_uint(rng, 3)));
    market.cells.push_back("market_" + std::to_string(bounded_uint(rng, 2)));
    offerdate.cells.push_back("2013-0" + std::to_string(1 + bounded_uint(rng, 4)) + "-" +
                              std::to_string(10 + bounded_uint(rng, 18)));
    id.cells.push_back(static_cast<std::int64_t>(r));
    repeater.cells.push_back(bounded_uint(rng, 2) ? "t" : "f");
    offer.cells.push_back(static_cast<std::int64_t>(101 + bounded_uint(rng, 4)));
  }
  history.add_column("chain", std::move(chain));
  history.add_column("market", std::move(market));
  history.add_column("offerdate", std::move(offerdate));
  history.add_column("id", std::move(id));
  history.add_column("repeater", std::move(repeater));
  history.add_column("offer", std::move(offer));
  write_parquet((root / "data" / "history.pqt").string(), history);
}

void write_mag_payload(const fs::path& root) {
  std::mt19937_64 rng(13);
  const std::size_t n_papers = 50;
  const std::size_t n_authors = 20;
  const std::size_t n_fields = 6;
  const std::size_t n_institutions = 4;

  TableData paper;
  paper.table_name = "paper";
  paper.row_count = n_papers;
  {
    Column id, label, feat, year;
    for (std::size_t p = 0; p < n_papers; ++p) {
      id.cells.push_back(static_cast<std::int64_t>(p));
      label.cells.push_back(static_cast<std::int64_t>(bounded_uint(rng, 5)));
      std::vector<double> vec(4);
      for (auto& v : vec) v = unit_real(rng);
      feat.cells.emplace_back(std::move(vec));
      year.cells.push_back(static_cast<std::int64_t>(2010 + bounded_uint(rng, 10)));
    }
    paper.add_column("paperID", std::move(id));
    paper.add_column("label", std::move(label));
    paper.add_column("feat", std::move(feat));
    paper.add_column("year", std::move(year));
  }
  write_npz((root / "paper.npz").string(), paper);

  auto edge_table = [&](const char* name, const char* col_a, std::size_t bound_a,
                        const char* col_b, std::size_t bound_b, std::size_t rows) {
    TableData table;
    table.table_name = name;
    table.row_count = rows;
    Column a, b;
    for (std::size_t r = 0; r < rows; ++r) {
      a.cells.push_back(static_cast<std::int64_t>(bounded_uint(rng, bound_a)));
      b.cells.push_back(static_cast<std::int64_t>(bounded_uint(rng, bound_b)));
    }
    table.add_column(col_a, std::move(a));
    table.add_column(col_b, std::move(b));
    return table;
  };
  write_csv((root / "cites.csv").string(),
            edge_table("Cites", "paper_cite", n_papers, "paper_cited", n_papers, 120));
  write_csv((root / "has_topic.csv").string(),
            edge_table("HasTopic", "paper_name", n_papers, "field_of_study", n_fields, 80));
  write_csv((root / "affiliated_with.csv").string(),
            edge_table("AffiliatedWith", "author", n_authors, "institution", n_institutions, 30));
  write_csv((root / "writes.csv").string(),
            edge_table("Writes", "paper_writer", n_authors, "arxiv_id", n_papers, 100));
}

}  // namespace

std::vector<std::string> fixture_names() {
  return {"cot_paper_journal", "avs_min", "mag_five"};
}

Fixture load_fixture(const std::string& name, const std::string& temp_root) {
  const auto known = fixture_names();
  if (std::find(known.begin(), known.end(), name) == known.end()) {
    throw IoError("unknown fixture '" + name + "'");
  }
  const fs::path source = fs::path(fixtures_root()) / name;
  const fs::path root = fs::path(temp_root) / name;
  fs::create_directories(root);

  const auto schema_text = read_file(source / "schema.yaml");
  write_file(root / "schema.yaml", schema_text);

  Fixture fixture;
  fixture.name = name;
  fixture.root = root.string();

  if (name == "cot_paper_journal") {
    write_cot_payload(root);
    write_transcript(root / "transcript.jsonl");
    fixture.transcript_path = (root / "transcript.jsonl").string();
    Task task;
    task.name = "category";
    task.target_type = "Paper";
    task.label_column = "Category";
    task.objective = TaskObjective::kClassification;
    task.metric = TaskMetric::kAccuracy;
    task.description =
        "Now I want to train a model which can predict the category of a paper based on the "
        "information in the paper.";
    fixture.tasks.push_back(task);
  } else if (name == "avs_min") {
    write_avs_payload(root);
    Task task;
    task.name = "repeat";
    task.target_type = "History";
    task.label_column = "repeater";
    task.objective = TaskObjective::kClassification;
    task.metric = TaskMetric::kAccuracy;
    task.description = "Predict whether a shopper repeats after an offer.";
    fixture.tasks.push_back(task);
  } else {
    write_mag_payload(root);
    Task task;
    task.name = "label";
    task.target_type = "paper";
    task.label_column = "label";
    task.objective = TaskObjective::kClassification;
    task.metric = TaskMetric::kAccuracy;
    task.description = "Predict the venue label of a paper.";
    fixture.tasks.push_back(task);
  }

  auto schema = parse_schema(schema_text);
  auto tables = load_dataset(schema, root.string());
  fixture.db = make_database(std::move(schema), std::move(tables));
  return fixture;
}

}  // namespace autog::corpus
