// Acceptance suite: one criterion per check, each printed as a PASS/FAIL
// line with its wall time and budget. The binary exits nonzero if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <memory>
#include <set>
#include <sstream>

#include "autog/corpus.hpp"
#include "autog/graph.hpp"
#include "autog/oracle.hpp"
#include "autog/planner.hpp"
#include "autog/synth.hpp"
#include "autog/util.hpp"
#include "test_support.hpp"

using namespace autog;
using autog::testing::TempDir;

namespace {

struct Criterion {
  int number;
  std::string name;
  double budget_seconds;
  std::function<void()> body;
};

int g_failures = 0;

void require(bool condition, const std::string& message) {
  if (!condition) throw std::runtime_error(message);
}

void run(const Criterion& criterion) {
  const auto start = std::chrono::steady_clock::now();
  std::string error;
  try {
    criterion.body();
  } catch (const std::exception& e) {
    error = e.what();
  }
  const auto elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (error.empty() && elapsed > criterion.budget_seconds) {
    error = "time budget exceeded";
  }
  std::ostringstream line;
  line << (error.empty() ? "[PASS]" : "[FAIL]") << " criterion " << criterion.number << ": "
       << criterion.name << " (" << format_double(elapsed, 2) << "s < "
       << format_double(criterion.budget_seconds, 0) << "s)";
  if (!error.empty()) {
    line << " -- " << error;
    ++g_failures;
  }
  std::cout << line.str() << "\n";
}

// ---- shared builders ----

std::string selection_payload(const std::vector<Action>& actions) {
  nlohmann::ordered_json array = nlohmann::ordered_json::array();
  for (const auto& action : actions) array.push_back(action.to_json());
  return "<selection>" + array.dump() + "</selection>";
}

std::vector<Action> key_actions(const SynthDataset& dataset) {
  std::vector<Action> actions;
  for (const auto& keyed : dataset.key.actions) actions.push_back(keyed.action);
  return actions;
}

Action harmful_action() {
  Action action;
  action.kind = ActionKind::kGenerateOrConnectDummyTable;
  action.explanation = "connect the label-independent tag column";
  action.parameters = {{"base_table_name", "Paper"},
                       {"orig_col_name", "rand_tag"},
                       {"new_table_name", "RandTag"},
                       {"new_col_name", "tag"}};
  return action;
}

std::vector<std::int64_t> encode_label_column(const HeteroGraph& graph,
                                              const std::string& node_type,
                                              const std::string& column) {
  const auto* node = graph.find_node(node_type);
  std::vector<std::int64_t> labels;
  std::map<std::string, std::int64_t> ids;
  for (const auto& cell : node->features.column(column).cells) {
    labels.push_back(ids.emplace(cell_to_string(cell), ids.size()).first->second);
  }
  return labels;
}

// ---- criteria ----

void criterion_schema_round_trip() {
  std::mt19937_64 rng(1001);
  for (int i = 0; i < 200; ++i) {
    const auto db = autog::testing::gen_database(rng);
    const auto text = serialize_schema(db.schema);
    const auto reparsed = parse_schema(text);
    require(reparsed == db.schema, "round trip changed a generated schema");
    require(serialize_schema(reparsed) == text, "canonicalization is not idempotent");
  }
  TempDir dir("acc1");
  const auto fixture = corpus::load_fixture("avs_min", dir.str());
  const auto original = autog::testing::read_file(
      std::filesystem::path(fixture.root) / "schema.yaml");
  require(serialize_schema(fixture.db.schema) == original,
          "AVS fixture is not a serialization fixed point");
}

void criterion_cot_replay() {
  TempDir dir("acc2");
  const auto fixture = corpus::load_fixture("cot_paper_journal", dir.str());
  ScriptedClient client(transcript_completions(fixture.transcript_path));
  SessionOptions options;
  const auto session = run_autog_s(fixture.db, fixture.tasks[0], client, options);
  require(session.terminal, "session did not terminate on None");
  require(session.applied.size() == 4, "expected exactly four applied actions");
  require(validate_schema(session.db.schema).empty(), "final schema has violations");

  std::set<std::string> tables;
  for (const auto& table : session.db.schema.tables) tables.insert(table.name);
  require(tables == std::set<std::string>{"Paper", "Journal", "Author", "Publisher"},
          "final tables differ from {Paper, Journal, Publisher, Author}");
  std::set<std::string> dummies;
  for (const auto& dummy : session.db.schema.derived) dummies.insert(dummy.name);
  require(dummies == std::set<std::string>{"Keyword", "AuthorName"},
          "final dummies differ from {Keyword, AuthorName}");

  const auto graph = build_graph(session.db, BuildMode::kRow2NodeEdge);
  require(graph.nodes.size() == 5, "expected 5 node types");
  const std::set<std::string> expected_relations = {
      "Paper.Journal",     "Paper.Keyword",     "Paper.Publisher",     "Author",
      "Paper.Journal_rev", "Paper.Keyword_rev", "Paper.Publisher_rev", "Author_rev"};
  std::set<std::string> relations;
  for (const auto& edge : graph.edges) relations.insert(edge.relation);
  require(relations == expected_relations, "edge type inventory differs");
  // the Author edge connects Paper and the AuthorName dummy
  const auto* author = graph.find_edge("Author");
  require(author->source == "Paper" && author->destination == "AuthorName",
          "Author edge endpoints are wrong");
}

void criterion_row2node_edge() {
  std::mt19937_64 rng(1003);
  std::size_t edge_tables_seen = 0;
  for (int i = 0; i < 50; ++i) {
    autog::testing::GenOptions options;
    options.max_tables = 4;
    options.force_edge_shaped_table = true;
    const auto db = autog::testing::gen_database(rng, options);
    const auto edge_roles = classify_tables(db.schema, BuildMode::kRow2NodeEdge);
    const auto node_roles = classify_tables(db.schema, BuildMode::kRow2Node);
    for (const auto& role : node_roles) {
      require(role.role != TableRoleKind::kEdge, "row2node must not produce edge roles");
    }
    std::map<std::string, TableRoleKind> role_of;
    for (const auto& role : edge_roles) role_of[role.table] = role.role;

    for (const auto mode : {BuildMode::kRow2Node, BuildMode::kRow2NodeEdge}) {
      const auto graph = build_graph(db, mode);
      for (const auto& table : db.schema.tables) {
        const bool is_edge =
            mode == BuildMode::kRow2NodeEdge && role_of[table.name] == TableRoleKind::kEdge;
        if (is_edge) {
          ++edge_tables_seen;
          std::vector<const ColumnDef*> fks;
          for (const auto& column : table.columns) {
            if (column.dtype == DataType::kForeignKey) fks.push_back(&column);
          }
          require(fks.size() == 2 && !table.primary_key(),
                  "edge role assigned outside the 2-FK-no-PK case");
          std::size_t survivors = 0;
          const auto& a = db.table(table.name).column(fks[0]->name).cells;
          const auto& b = db.table(table.name).column(fks[1]->name).cells;
          for (std::size_t r = 0; r < a.size(); ++r) {
            if (!is_null(a[r]) && !is_null(b[r])) ++survivors;
          }
          require(graph.find_edge(table.name)->endpoints.size() == survivors,
                  "edge-role conservation violated");
        } else {
          for (const auto& column : table.columns) {
            if (column.dtype != DataType::kForeignKey) continue;
            std::size_t non_null = 0;
            for (const auto& cell : db.table(table.name).column(column.name).cells) {
              if (!is_null(cell)) ++non_null;
            }
            require(graph.find_edge(table.name + "." + column.name)->endpoints.size() ==
                        non_null,
                    "node-role conservation violated");
          }
        }
      }
    }
  }
  require(edge_tables_seen >= 25, "generator failed to exercise edge-shaped tables");
}

void criterion_action_conservation() {
  std::mt19937_64 rng(1004);
  std::size_t applied = 0;
  while (applied < 500) {
    auto db = autog::testing::gen_database(rng);
    for (int step = 0; step < 6 && applied < 500; ++step) {
      const auto candidates = autog::testing::applicable_actions(db, rng);
      if (candidates.empty()) break;
      const auto& action = candidates[bounded_uint(rng, candidates.size())];
      const auto before = db;
      const auto result = apply_action(db, action);
      if (!result.ok()) {
        require(result.error->code != "post-validate", "invalid schema escaped an applier");
        continue;
      }
      require(validate_schema(result.after.schema).empty(), "post-apply schema invalid");
      switch (action.kind) {
        case ActionKind::kGenerateOrConnectDummyTable: {
          const auto table = action.param("base_table_name");
          const auto column = action.param("orig_col_name");
          require(autog::testing::decoded_multiset(result.after, table, column) ==
                      autog::testing::category_multiset(before.table(table).column(column)),
                  "dummy connection lost category values");
          break;
        }
        case ActionKind::kExplodeMultiCategoryColumn: {
          const auto table = action.param("original_table");
          const auto column = action.param("multi_cat_col");
          std::size_t elements = 0;
          for (const auto& cell : before.table(table).column(column).cells) {
            if (!is_list(cell)) continue;
            for (const auto& item : std::get<std::vector<Scalar>>(cell)) {
              if (!is_null(item)) ++elements;
            }
          }
          require(result.after.table(action.param("new_table_name")).row_count == elements,
                  "explode changed the flattened element count");
          break;
        }
        case ActionKind::kGenerateNonDummyTable: {
          const auto base = action.param("base_table_name");
          const auto new_table = action.param("new_table_name");
          std::vector<std::string> cols;
          for (const auto& col : action.parameters.at("cols")) {
            cols.push_back(col.get<std::string>());
          }
          const auto& fk = result.after.table(base).column(new_table).cells;
          std::vector<std::string> reconstructed, original;
          for (std::size_t row = 0; row < fk.size(); ++row) {
            const auto code = static_cast<std::size_t>(std::get<std::int64_t>(fk[row]));
            std::string joined_new, joined_old;
            for (const auto& col : cols) {
              joined_new += cell_to_string(result.after.table(new_table).column(col).cells[code]);
              joined_new.push_back('|');
              joined_old += cell_to_string(before.table(base).column(col).cells[row]);
              joined_old.push_back('|');
            }
            reconstructed.push_back(joined_new);
            original.push_back(joined_old);
          }
          std::sort(reconstructed.begin(), reconstructed.end());
          std::sort(original.begin(), original.end());
          require(reconstructed == original,
                  "dedup-join reconstruction lost the moved tuple multiset");
          break;
        }
        default:
          break;
      }
      db = std::move(result.after);
      ++applied;
    }
  }
}

void criterion_homophily_diagnosis() {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    BenchSpec spec;
    spec.seed = seed;
    spec.n_papers = 150;
    spec.n_authors = 50;
    const auto dataset = generate(spec);
    const auto result = apply_script(dataset.db, key_actions(dataset));
    require(result.ok(), "answer key did not apply");
    const auto graph = build_graph(result.after, BuildMode::kRow2NodeEdge);
    const auto projection =
        metapath_project(graph, "Paper", dataset.key.expected_metapaths.at("venue"));
    const auto community =
        adjusted_homophily(projection, encode_label_column(graph, "Paper", "venue_label"));
    const auto noise =
        adjusted_homophily(projection, encode_label_column(graph, "Paper", "year_label"));
    require(community >= 0.3, "community-label homophily below 0.3 (seed " +
                                  std::to_string(seed) + ", got " +
                                  format_double(community, 3) + ")");
    require(std::abs(noise) <= 0.1, "noise-label homophily outside ±0.1 (seed " +
                                        std::to_string(seed) + ", got " +
                                        format_double(noise, 3) + ")");
  }
}

void criterion_oracle_ranking() {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    BenchSpec spec;
    spec.seed = seed;
    spec.n_papers = 120;
    spec.n_authors = 40;
    const auto dataset = generate(spec);
    Task task = dataset.tasks[0];  // venue task

    struct Candidate {
      std::string id;
      Database db;
      std::size_t actions;
    };
    std::vector<Candidate> candidates;
    candidates.push_back({"no_relation", dataset.db, 0});
    {
      const auto harmful = apply_script(dataset.db, {harmful_action()});
      require(harmful.ok(), "harmful candidate did not apply");
      candidates.push_back({"harmful", harmful.after, 1});
    }
    {
      const auto planted = apply_script(dataset.db, key_actions(dataset));
      require(planted.ok(), "planted candidate did not apply");
      candidates.push_back({"planted", planted.after, key_actions(dataset).size()});
    }

    auto rank_under = [&](double budget) {
      std::vector<OracleReport> reports;
      for (const auto& candidate : candidates) {
        const auto graph = build_graph(candidate.db, BuildMode::kRow2NodeEdge);
        auto report = score_candidate(graph, task, default_basket(budget), candidate.id);
        report.action_count = candidate.actions;
        reports.push_back(std::move(report));
      }
      return rank_candidates(reports);
    };
    const auto full = rank_under(1.0);
    const auto early = rank_under(0.1);
    require(full.front() == "planted",
            "full-budget ranking does not place planted first (seed " + std::to_string(seed) +
                ")");
    require(kendall_tau_distance(full, early) == 0.0,
            "early-budget ranking deviates from full-budget ranking (seed " +
                std::to_string(seed) + ")");
  }
}

void criterion_autog_a_selection() {
  BenchSpec spec;
  spec.seed = 5;
  spec.n_papers = 120;
  spec.n_authors = 40;
  const auto dataset = generate(spec);

  const auto none_script = std::vector<std::string>{"<selection>None</selection>",
                                                    "<selection>None</selection>"};
  const auto planted_payload = selection_payload(key_actions(dataset));
  const std::vector<std::string> planted_script = {planted_payload, planted_payload,
                                                   "<selection>None</selection>",
                                                   "<selection>None</selection>"};
  auto factory = [&](std::size_t run) -> std::unique_ptr<ChatClient> {
    return std::make_unique<ScriptedClient>(run == 0 ? none_script : planted_script);
  };

  SessionOptions options;
  // homophilous task: the planted candidate must win
  {
    const auto venue = run_autog_a(dataset.db, dataset.tasks[0], factory, 2,
                                   default_basket(0.1), options);
    require(venue.best_run == 1, "planted candidate did not win the venue task");
    const auto repeat = run_autog_a(dataset.db, dataset.tasks[0], factory, 2,
                                    default_basket(0.1), options);
    require(repeat.best_run == venue.best_run, "selection is not deterministic");
  }
  // no-network-effect task: the original schema must win
  {
    const auto year = run_autog_a(dataset.db, dataset.tasks[1], factory, 2,
                                  default_basket(0.1), options);
    require(year.best_run == 0, "original schema did not win the noise task");
    require(year.best.applied.empty(), "winning session applied actions on the noise task");
  }
}

void criterion_threshold_and_close_endedness() {
  TempDir dir("acc8");
  const auto fixture = corpus::load_fixture("cot_paper_journal", dir.str());

  // adversarial client: always proposes a valid action, never terminates
  std::vector<std::string> responses;
  for (int i = 0; i < 60; ++i) {
    responses.push_back(
        "<selection>[{'explanation': 'more', 'action': 'generate_or_connect_dummy_table', "
        "'parameters': {'base_table_name': 'Paper', 'orig_col_name': 'Keyword', "
        "'new_table_name': 'Keyword', 'new_col_name': 'Keyword'}}]</selection>");
  }
  ScriptedClient client(responses);
  SessionOptions options;
  options.hard_threshold = 10;
  options.max_turns = 30;
  const auto session = run_autog_s(fixture.db, fixture.tasks[0], client, options);
  require(session.applied.size() == 10, "hard threshold of 10 applied actions not enforced");

  // 1000 malformed selections: structured rejection or a valid application,
  // never an exception and never an invalid schema
  std::mt19937_64 rng(1008);
  const std::string valid =
      "<selection>[{'explanation': 'x', 'action': 'generate_or_connect_dummy_table', "
      "'parameters': {'base_table_name': 'Paper', 'orig_col_name': 'Keyword', "
      "'new_table_name': 'Keyword', 'new_col_name': 'Keyword'}}]</selection>";
  std::size_t rejected = 0;
  for (int i = 0; i < 1000; ++i) {
    auto broken = valid;
    const auto op = bounded_uint(rng, 4);
    const auto at = bounded_uint(rng, broken.size());
    if (op == 0) broken.erase(at, 1 + bounded_uint(rng, 6));
    else if (op == 1) broken.insert(at, "]{',");
    else if (op == 2) broken[at] = static_cast<char>(32 + bounded_uint(rng, 95));
    else broken = broken.substr(0, at) + broken.substr(std::min(broken.size(), at + 7));
    Selection selection;
    try {
      selection = parse_selection(broken);
    } catch (...) {
      throw std::runtime_error("parse_selection threw instead of returning an error");
    }
    if (!selection.ok()) {
      require(!selection.error->empty(), "rejection without a structured error");
      ++rejected;
      continue;
    }
    if (selection.terminal) continue;
    for (const auto& action : selection.actions) {
      const auto result = apply_action(fixture.db, action);
      if (result.ok()) {
        require(validate_schema(result.after.schema).empty(),
                "a fuzzed action produced an invalid schema");
      } else {
        require(result.error->code != "post-validate",
                "an applier let an invalid schema through");
      }
    }
  }
  require(rejected >= 500, "fuzzer failed to generate enough malformed payloads");
}

void criterion_kendall_unit_truths() {
  require(kendall_tau_distance({"a", "b", "c"}, {"a", "b", "c"}) == 0.0, "identity distance");
  require(kendall_tau_distance({"a", "b", "c"}, {"c", "b", "a"}) == 1.0, "reversal distance");
  require(std::abs(kendall_tau_distance({"a", "b", "c"}, {"a", "c", "b"}) - 1.0 / 3.0) < 1e-12,
          "single-swap distance");
  for (std::size_t n = 2; n <= 4; ++n) {
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back(std::string(1, char('a' + i)));
    std::vector<std::vector<std::string>> permutations;
    std::sort(ids.begin(), ids.end());
    do {
      permutations.push_back(ids);
    } while (std::next_permutation(ids.begin(), ids.end()));
    for (const auto& p : permutations) {
      for (const auto& q : permutations) {
        const auto d = kendall_tau_distance(p, q);
        require(std::abs(d - kendall_tau_distance(q, p)) < 1e-12, "symmetry");
        require((d == 0.0) == (p == q), "identity of indiscernibles");
        for (const auto& r : permutations) {
          require(kendall_tau_distance(p, r) <= d + kendall_tau_distance(q, r) + 1e-12,
                  "triangle inequality");
        }
      }
    }
  }
}

void criterion_anonymization_harness() {
  BenchSpec spec;
  spec.seed = 10;
  spec.n_papers = 60;
  spec.n_authors = 20;
  const auto dataset = generate(spec);
  const auto actions = key_actions(dataset);

  const auto original_report = score_against_key(actions, dataset.key);
  std::cout << "    recovery (original):   " << original_report.render() << "\n";
  for (const auto& [challenge, counts] : original_report.per_challenge) {
    require(counts.first == counts.second,
            "answer-key replay must recover every " + challenge + " action");
  }

  const auto anonymized = anonymize(dataset.db, dataset.tasks, 10);
  const auto translated = translate_actions(actions, anonymized.name_map);
  const auto replay = apply_script(anonymized.db, translated);
  require(replay.ok(), "translated key did not apply to the anonymized dataset");
  std::map<std::string, std::string> reverse;
  for (const auto& [original, token] : anonymized.name_map) reverse[token] = original;
  const auto recovered = translate_actions(translated, reverse);
  const auto anonymized_report = score_against_key(recovered, dataset.key);
  std::cout << "    recovery (anonymized): " << anonymized_report.render() << "\n";
  for (const auto& [challenge, counts] : anonymized_report.per_challenge) {
    require(counts.first == counts.second,
            "anonymized replay must recover every " + challenge + " action");
  }
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "schema language round trip and canonical idempotence", 1.0,
       criterion_schema_round_trip},
      {2, "CoT replay equivalence on the Paper/Journal fixture", 1.0, criterion_cot_replay},
      {3, "Row2Node/Edge discrimination and edge conservation", 2.0, criterion_row2node_edge},
      {4, "action-engine conservation over 500 random actions", 10.0,
       criterion_action_conservation},
      {5, "homophily diagnosis analogue on the synth C4 dataset", 5.0,
       criterion_homophily_diagnosis},
      {6, "oracle ranking fidelity at full and 10% budget", 30.0, criterion_oracle_ranking},
      {7, "AutoG-A selects planted vs original per task", 30.0, criterion_autog_a_selection},
      {8, "threshold safety and close-endedness under fuzzing", 10.0,
       criterion_threshold_and_close_endedness},
      {9, "Kendall metric unit truths and axioms", 1.0, criterion_kendall_unit_truths},
      {10, "anonymization degradation harness", 30.0, criterion_anonymization_harness},
  };
  for (const auto& criterion : criteria) run(criterion);
  if (g_failures) {
    std::cout << g_failures << " criterion(s) failed\n";
    return 1;
  }
  std::cout << "all 10 acceptance criteria passed\n";
  return 0;
}
