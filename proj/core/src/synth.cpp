#include "autog/synth.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "autog/table_io.hpp"
#include "autog/util.hpp"

namespace autog {

void BenchSpec::validate() const {
  if (n_papers < 10 || n_authors < 10) {
    throw ParseError("bench spec sizes must be at least 10 rows");
  }
  if (!(c1_renamed_fk || c2_self_induced || c3_edge_table_with_spurious_pk || c4_dual_tasks)) {
    throw ParseError("bench spec must enable at least one challenge");
  }
  if (communities < 2) throw ParseError("bench spec needs at least two communities");
  if (flip_noise < 0.0 || flip_noise >= 0.5) {
    throw ParseError("flip_noise must lie in [0, 0.5)");
  }
}

namespace {

// Imbalanced class prior so the majority baseline separates from chance.
std::vector<double> community_priors(std::size_t communities) {
  std::vector<double> weights;
  double remaining = 1.0;
  for (std::size_t k = 0; k + 1 < communities; ++k) {
    const double w = remaining * 0.45 + (k + 1 == communities - 1 ? 0.0 : 0.0);
    weights.push_back(k == 0 ? 0.4 : w);
    remaining -= weights.back();
  }
  weights.push_back(remaining);
  // normalize defensively
  double total = 0.0;
  for (const double w : weights) total += w;
  for (double& w : weights) w /= total;
  return weights;
}

std::size_t draw_class(std::mt19937_64& rng, const std::vector<double>& priors) {
  const double roll = unit_real(rng);
  double cumulative = 0.0;
  for (std::size_t k = 0; k < priors.size(); ++k) {
    cumulative += priors[k];
    if (roll < cumulative) return k;
  }
  return priors.size() - 1;
}

Action make_action(ActionKind kind, std::map<std::string, nlohmann::json> params,
                   std::string explanation) {
  Action action;
  action.kind = kind;
  action.parameters = std::move(params);
  action.explanation = std::move(explanation);
  return action;
}

}  // namespace

SynthDataset generate(const BenchSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  const auto priors = community_priors(spec.communities);

  // Latent structure.
  std::vector<std::size_t> paper_community(spec.n_papers);
  std::vector<std::size_t> author_community(spec.n_authors);
  for (auto& z : paper_community) z = draw_class(rng, priors);
  for (auto& z : author_community) z = draw_class(rng, priors);
  std::vector<std::vector<std::size_t>> authors_by_community(spec.communities);
  for (std::size_t a = 0; a < spec.n_authors; ++a) {
    authors_by_community[author_community[a]].push_back(a);
  }

  auto flip = [&](std::size_t value, std::size_t bound) {
    if (unit_real(rng) < spec.flip_noise) {
      return static_cast<std::size_t>(bounded_uint(rng, bound));
    }
    return value;
  };

  // Paper table.
  TableDef paper_def;
  paper_def.name = "Paper";
  paper_def.source = "paper.csv";
  paper_def.format = TableFormat::kCsv;
  paper_def.columns.push_back(ColumnDef{"paperID", DataType::kPrimaryKey, {}, {}});
  paper_def.columns.push_back(ColumnDef{"title", DataType::kText, {}, {}});
  TableData paper_data;
  paper_data.table_name = "Paper";
  paper_data.row_count = spec.n_papers;
  {
    Column ids, titles;
    for (std::size_t p = 0; p < spec.n_papers; ++p) {
      ids.cells.push_back(static_cast<std::int64_t>(p));
      titles.cells.push_back("A study of topic " + std::to_string(rng() % 9973));
    }
    paper_data.add_column("paperID", std::move(ids));
    paper_data.add_column("title", std::move(titles));
  }

  // Labels: the community label follows the latent community with flip
  // noise; the noise label is an independent draw from the same priors.
  {
    Column venue;
    for (std::size_t p = 0; p < spec.n_papers; ++p) {
      const auto label = flip(paper_community[p], spec.communities);
      venue.cells.push_back("venue_" + std::to_string(label));
    }
    paper_def.columns.push_back(ColumnDef{"venue_label", DataType::kCategory, {}, {}});
    paper_data.add_column("venue_label", std::move(venue));
  }
  if (spec.c4_dual_tasks) {
    Column year;
    for (std::size_t p = 0; p < spec.n_papers; ++p) {
      year.cells.push_back("year_" + std::to_string(draw_class(rng, priors)));
    }
    paper_def.columns.push_back(ColumnDef{"year_label", DataType::kCategory, {}, {}});
    paper_data.add_column("year_label", std::move(year));
  }

  if (spec.c2_self_induced) {
    const std::size_t n_fields = spec.communities * spec.fields_per_community;
    Column field;
    for (std::size_t p = 0; p < spec.n_papers; ++p) {
      std::size_t fid = paper_community[p] * spec.fields_per_community +
                        static_cast<std::size_t>(bounded_uint(rng, spec.fields_per_community));
      fid = flip(fid, n_fields);
      field.cells.push_back("field_" + std::to_string(fid));
    }
    paper_def.columns.push_back(ColumnDef{"field", DataType::kCategory, {}, {}});
    paper_data.add_column("field", std::move(field));

    const std::size_t n_keywords = spec.communities * spec.keywords_per_community;
    Column keywords;
    for (std::size_t p = 0; p < spec.n_papers; ++p) {
      std::vector<Scalar> cell;
      const std::size_t count = 1 + static_cast<std::size_t>(bounded_uint(rng, 3));
      for (std::size_t k = 0; k < count; ++k) {
        std::size_t kid = paper_community[p] * spec.keywords_per_community +
                          static_cast<std::size_t>(bounded_uint(rng, spec.keywords_per_community));
        kid = flip(kid, n_keywords);
        cell.push_back("kw_" + std::to_string(kid));
      }
      keywords.cells.emplace_back(std::move(cell));
    }
    paper_def.columns.push_back(ColumnDef{"keywords", DataType::kMultiCategory, {}, {}});
    paper_data.add_column("keywords", std::move(keywords));
  }

  {
    // Label-independent tag: the raw material for harmful-relation candidates.
    Column tag;
    for (std::size_t p = 0; p < spec.n_papers; ++p) {
      tag.cells.push_back("tag_" + std::to_string(bounded_uint(rng, 6)));
    }
    paper_def.columns.push_back(ColumnDef{"rand_tag", DataType::kCategory, {}, {}});
    paper_data.add_column("rand_tag", std::move(tag));
  }

  // Author table.
  TableDef author_def;
  author_def.name = "Author";
  author_def.source = "author.csv";
  author_def.format = TableFormat::kCsv;
  author_def.columns.push_back(ColumnDef{"authorID", DataType::kPrimaryKey, {}, {}});
  author_def.columns.push_back(ColumnDef{"name", DataType::kText, {}, {}});
  TableData author_data;
  author_data.table_name = "Author";
  author_data.row_count = spec.n_authors;
  {
    Column ids, names;
    for (std::size_t a = 0; a < spec.n_authors; ++a) {
      ids.cells.push_back(static_cast<std::int64_t>(a));
      names.cells.push_back("Author Number " + std::to_string(a));
    }
    author_data.add_column("authorID", std::move(ids));
    author_data.add_column("name", std::move(names));
  }

  // Writes table: paper_ref/writer deliberately do not share names with the
  // primary keys they reference, and carry no declared link.
  TableDef writes_def;
  writes_def.name = "Writes";
  writes_def.source = "writes.csv";
  writes_def.format = TableFormat::kCsv;
  TableData writes_data;
  writes_data.table_name = "Writes";
  {
    Column rec, paper_ref, writer;
    std::int64_t next_rec = 0;
    for (std::size_t p = 0; p < spec.n_papers; ++p) {
      const std::size_t count = 1 + static_cast<std::size_t>(bounded_uint(rng, 3));
      std::set<std::size_t> used;
      for (std::size_t k = 0; k < count; ++k) {
        std::size_t community = paper_community[p];
        if (unit_real(rng) < spec.flip_noise) {
          community = static_cast<std::size_t>(bounded_uint(rng, spec.communities));
        }
        const auto& pool = authors_by_community[community].empty()
                               ? authors_by_community[(community + 1) % spec.communities]
                               : authors_by_community[community];
        if (pool.empty()) continue;
        const auto author = pool[bounded_uint(rng, pool.size())];
        if (!used.insert(author).second) continue;
        rec.cells.push_back(next_rec++);
        paper_ref.cells.push_back(static_cast<std::int64_t>(p));
        writer.cells.push_back(static_cast<std::int64_t>(author));
      }
    }
    writes_data.row_count = rec.cells.size();
    if (spec.c3_edge_table_with_spurious_pk) {
      writes_def.columns.push_back(ColumnDef{"recID", DataType::kPrimaryKey, {}, {}});
      writes_data.add_column("recID", std::move(rec));
    }
    if (spec.c1_renamed_fk) {
      writes_def.columns.push_back(ColumnDef{"paper_ref", DataType::kCategory, {}, {}});
      writes_def.columns.push_back(ColumnDef{"writer", DataType::kCategory, {}, {}});
    } else {
      writes_def.columns.push_back(
          ColumnDef{"paper_ref", DataType::kForeignKey, "Paper.paperID", {}});
      writes_def.columns.push_back(
          ColumnDef{"writer", DataType::kForeignKey, "Author.authorID", {}});
    }
    writes_data.add_column("paper_ref", std::move(paper_ref));
    writes_data.add_column("writer", std::move(writer));
  }

  DatasetSchema schema;
  schema.dataset_name = "synth_mag";
  schema.tables = {paper_def, author_def, writes_def};

  SynthDataset dataset;
  std::map<std::string, TableData> payload;
  payload.emplace("Paper", std::move(paper_data));
  payload.emplace("Author", std::move(author_data));
  payload.emplace("Writes", std::move(writes_data));
  dataset.db = make_database(std::move(schema), std::move(payload));

  // Tasks.
  Task venue_task;
  venue_task.name = "venue";
  venue_task.target_type = "Paper";
  venue_task.label_column = "venue_label";
  venue_task.objective = TaskObjective::kClassification;
  venue_task.metric = TaskMetric::kAccuracy;
  venue_task.seed = spec.seed;
  venue_task.description =
      "Predict the venue of a paper. You may use the relations between papers, authors and "
      "fields to improve the performance.";
  dataset.tasks.push_back(venue_task);
  if (spec.c4_dual_tasks) {
    Task year_task = venue_task;
    year_task.name = "year";
    year_task.label_column = "year_label";
    year_task.description = "Predict the publication year bucket of a paper.";
    dataset.tasks.push_back(year_task);
  }

  // Ground-truth actions.
  if (spec.c1_renamed_fk) {
    dataset.key.actions.push_back(
        {"c1", make_action(ActionKind::kConnectTwoColumns,
                           {{"table_1_name", "Writes"},
                            {"table_1_col_name", "paper_ref"},
                            {"table_2_name", "Paper"},
                            {"table_2_col_name", "paperID"}},
                           "paper_ref holds Paper keys under a different name")});
    dataset.key.actions.push_back(
        {"c1", make_action(ActionKind::kConnectTwoColumns,
                           {{"table_1_name", "Writes"},
                            {"table_1_col_name", "writer"},
                            {"table_2_name", "Author"},
                            {"table_2_col_name", "authorID"}},
                           "writer holds Author keys under a different name")});
  }
  if (spec.c3_edge_table_with_spurious_pk) {
    dataset.key.actions.push_back(
        {"c3", make_action(ActionKind::kRemovePrimaryKey,
                           {{"base_table_name", "Writes"}, {"col_name", "recID"}},
                           "recID is a spurious index; Writes should become an edge")});
  }
  if (spec.c2_self_induced) {
    dataset.key.actions.push_back(
        {"c2", make_action(ActionKind::kGenerateOrConnectDummyTable,
                           {{"base_table_name", "Paper"},
                            {"orig_col_name", "field"},
                            {"new_table_name", "Field"},
                            {"new_col_name", "field"}},
                           "papers sharing a field share a venue")});
    dataset.key.actions.push_back(
        {"c2", make_action(ActionKind::kExplodeMultiCategoryColumn,
                           {{"original_table", "Paper"},
                            {"multi_cat_col", "keywords"},
                            {"primary_key_column", "paperID"},
                            {"new_table_name", "PaperKeyword"},
                            {"new_col_name", "keyword"},
                            {"dtype", "foreign_key"}},
                           "keyword co-occurrence induces a useful relation")});
  }
  dataset.key.expected_roles["Paper"] = "node";
  dataset.key.expected_roles["Author"] = "node";
  dataset.key.expected_roles["Writes"] = "edge";
  dataset.key.expected_metapaths["venue"] = {"Paper.field", "Paper.field_rev"};
  dataset.key.better_task = "venue";
  dataset.key.worse_task = spec.c4_dual_tasks ? "year" : "";
  return dataset;
}

void write_synth_dataset(const SynthDataset& dataset, const std::string& directory) {
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  {
    std::ofstream out(fs::path(directory) / "schema.yaml");
    if (!out) throw IoError("cannot write schema.yaml in '" + directory + "'");
    out << serialize_schema(dataset.db.schema);
  }
  for (const auto& [name, data] : dataset.db.tables) {
    const auto* def = dataset.db.schema.find_table(name);
    write_csv((fs::path(directory) / def->source).string(), data);
  }
  {
    nlohmann::ordered_json tasks = nlohmann::ordered_json::array();
    for (const auto& task : dataset.tasks) tasks.push_back(task.to_json());
    std::ofstream out(fs::path(directory) / "tasks.json");
    out << tasks.dump(2) << "\n";
  }
  {
    std::ofstream out(fs::path(directory) / "answer_key.json");
    out << dataset.key.to_json().dump(2) << "\n";
  }
}

nlohmann::ordered_json AnswerKey::to_json() const {
  nlohmann::ordered_json out;
  auto entries = nlohmann::ordered_json::array();
  for (const auto& keyed : actions) {
    auto entry = keyed.action.to_json();
    entry["challenge"] = keyed.challenge;
    entries.push_back(entry);
  }
  out["actions"] = entries;
  out["expected_roles"] = expected_roles;
  out["expected_metapaths"] = expected_metapaths;
  out["better_task"] = better_task;
  out["worse_task"] = worse_task;
  return out;
}

AnswerKey AnswerKey::from_json(const nlohmann::json& value) {
  AnswerKey key;
  for (const auto& entry : value.at("actions")) {
    KeyedAction keyed;
    keyed.challenge = entry.value("challenge", "");
    keyed.action = Action::from_json(entry);
    key.actions.push_back(std::move(keyed));
  }
  if (value.contains("expected_roles")) {
    for (const auto& [table, role] : value["expected_roles"].items()) {
      key.expected_roles[table] = role.get<std::string>();
    }
  }
  if (value.contains("expected_metapaths")) {
    for (const auto& [task, path] : value["expected_metapaths"].items()) {
      key.expected_metapaths[task] = path.get<std::vector<std::string>>();
    }
  }
  key.better_task = value.value("better_task", "");
  key.worse_task = value.value("worse_task", "");
  return key;
}

Anonymized anonymize(const Database& db, const std::vector<Task>& tasks, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Anonymized out;
  out.name_map.clear();
  std::set<std::string> used;
  auto token = [&](const char* prefix) {
    while (true) {
      const auto candidate =
          std::string(prefix) + "_" + to_hex(rng()).substr(10);  // short, seeded, opaque
      if (used.insert(candidate).second) return candidate;
    }
  };

  DatasetSchema schema = db.schema;
  std::map<std::string, std::string> table_tokens;
  std::map<std::string, std::map<std::string, std::string>> column_tokens;
  for (auto& table : schema.tables) {
    table_tokens[table.name] = token("tbl");
    for (auto& column : table.columns) {
      column_tokens[table.name][column.name] = token("col");
    }
  }
  std::map<std::string, std::string> dummy_tokens;
  std::map<std::string, std::string> dummy_key_tokens;
  for (const auto& dummy : schema.derived) {
    dummy_tokens[dummy.name] = token("tbl");
    dummy_key_tokens[dummy.name] = token("col");
  }

  for (auto& table : schema.tables) {
    for (auto& column : table.columns) {
      if (column.link_to) {
        const auto target_table = column.link_table();
        const auto target_column = column.link_column();
        if (table_tokens.count(target_table)) {
          column.link_to =
              table_tokens[target_table] + "." + column_tokens[target_table][target_column];
        } else {
          column.link_to = dummy_tokens[target_table] + "." + dummy_key_tokens[target_table];
        }
      }
      out.name_map[table.name + "." + column.name] =
          table_tokens[table.name] + "." + column_tokens[table.name][column.name];
      column.name = column_tokens[table.name][column.name];
    }
    if (table.time_column) table.time_column = column_tokens[table.name][*table.time_column];
    out.name_map[table.name] = table_tokens[table.name];
    table.name = table_tokens[table.name];
  }
  for (const auto& [name, tok] : dummy_tokens) out.name_map[name] = tok;

  out.db.schema = resolve_links(schema);
  for (const auto& [name, data] : db.tables) {
    TableData renamed = data;
    renamed.table_name = table_tokens[name];
    for (auto& column_name : renamed.order) column_name = column_tokens[name][column_name];
    out.db.tables.emplace(table_tokens[name], std::move(renamed));
  }
  for (const auto& [name, data] : db.dummies) {
    TableData renamed = data;
    renamed.table_name = dummy_tokens[name];
    for (auto& column_name : renamed.order) column_name = dummy_key_tokens[name];
    out.db.dummies.emplace(dummy_tokens[name], std::move(renamed));
  }
  for (const auto& task : tasks) {
    Task renamed = task;
    renamed.target_type = table_tokens.count(task.target_type)
                              ? table_tokens[task.target_type]
                              : task.target_type;
    if (!task.label_column.empty() && column_tokens.count(task.target_type)) {
      renamed.label_column = column_tokens[task.target_type][task.label_column];
    }
    out.tasks.push_back(std::move(renamed));
  }
  return out;
}

std::vector<Action> translate_actions(const std::vector<Action>& actions,
                                      const std::map<std::string, std::string>& name_map) {
  // name_map holds "Table" -> token and "Table.Column" -> "tok.tok" entries.
  auto map_table = [&](const std::string& name) {
    const auto it = name_map.find(name);
    return it == name_map.end() ? name : it->second;
  };
  auto map_column = [&](const std::string& table, const std::string& column) {
    const auto it = name_map.find(table + "." + column);
    if (it == name_map.end()) return column;
    const auto dot = it->second.find('.');
    return dot == std::string::npos ? it->second : it->second.substr(dot + 1);
  };

  static const std::map<std::string, std::string> kColumnOwner = {
      {"orig_col_name", "base_table_name"},   {"col_name", "base_table_name"},
      {"table_1_col_name", "table_1_name"},   {"table_2_col_name", "table_2_name"},
      {"multi_cat_col", "original_table"},    {"primary_key_column", "original_table"},
  };
  static const std::set<std::string> kTableParams = {"base_table_name", "table_1_name",
                                                     "table_2_name", "original_table"};

  std::vector<Action> translated;
  for (const auto& action : actions) {
    Action mapped = action;
    for (auto& [key, value] : mapped.parameters) {
      if (!value.is_string() && !(key == "cols" && value.is_array())) continue;
      if (key == "cols") {
        const auto owner = action.param("base_table_name");
        auto cols = nlohmann::json::array();
        for (const auto& col : value) {
          cols.push_back(map_column(owner, col.get<std::string>()));
        }
        value = cols;
        continue;
      }
      const auto owner_it = kColumnOwner.find(key);
      if (owner_it != kColumnOwner.end()) {
        value = map_column(action.param(owner_it->second), value.get<std::string>());
      } else if (kTableParams.count(key)) {
        value = map_table(value.get<std::string>());
      }
    }
    translated.push_back(std::move(mapped));
  }
  return translated;
}

namespace {

std::string action_signature(const Action& action) {
  switch (action.kind) {
    case ActionKind::kGenerateOrConnectDummyTable:
      return "dummy|" + action.param("base_table_name") + "." + action.param("orig_col_name");
    case ActionKind::kConnectTwoColumns: {
      auto a = action.param("table_1_name") + "." + action.param("table_1_col_name");
      auto b = action.param("table_2_name") + "." + action.param("table_2_col_name");
      if (b < a) std::swap(a, b);
      return "connect|" + a + "|" + b;
    }
    case ActionKind::kExplodeMultiCategoryColumn:
      return "explode|" + action.param("original_table") + "." + action.param("multi_cat_col") +
             "|" + (action.param("dtype") == "foreign_key" ? "edge" : "value");
    case ActionKind::kGenerateNonDummyTable: {
      std::vector<std::string> cols;
      const auto it = action.parameters.find("cols");
      if (it != action.parameters.end() && it->second.is_array()) {
        for (const auto& col : it->second) {
          if (col.is_string()) cols.push_back(col.get<std::string>());
        }
      }
      std::sort(cols.begin(), cols.end());
      return "move|" + action.param("base_table_name") + "|" + join(cols, ",");
    }
    case ActionKind::kRemovePrimaryKey:
      return "rmpk|" + action.param("base_table_name") + "." + action.param("col_name");
    case ActionKind::kAddPrimaryKey:
      return "addpk|" + action.param("base_table_name");
    case ActionKind::kNone:
      return "none";
  }
  return "none";
}

}  // namespace

double RecoveryReport::fraction(const std::string& challenge) const {
  const auto it = per_challenge.find(challenge);
  if (it == per_challenge.end() || it->second.second == 0) return 0.0;
  return static_cast<double>(it->second.first) / static_cast<double>(it->second.second);
}

std::string RecoveryReport::render() const {
  std::ostringstream out;
  bool first = true;
  for (const auto& [challenge, counts] : per_challenge) {
    if (!first) out << "  ";
    first = false;
    out << challenge << ": " << counts.first << "/" << counts.second;
  }
  return out.str();
}

RecoveryReport score_against_key(const std::vector<Action>& applied, const AnswerKey& key) {
  std::multiset<std::string> applied_signatures;
  for (const auto& action : applied) applied_signatures.insert(action_signature(action));
  RecoveryReport report;
  for (const auto& keyed : key.actions) {
    auto& counts = report.per_challenge[keyed.challenge];
    ++counts.second;
    const auto signature = action_signature(keyed.action);
    const auto it = applied_signatures.find(signature);
    if (it != applied_signatures.end()) {
      ++counts.first;
      applied_signatures.erase(it);
    }
  }
  return report;
}

}  // namespace autog
