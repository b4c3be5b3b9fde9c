// autog: operator surface for the tabular-to-graph pipeline.
// Exit codes: 0 ok, 1 pipeline failure, 2 usage. Diagnostics go to stderr,
// artifacts to files under --out.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "autog/corpus.hpp"
#include "autog/graph.hpp"
#include "autog/join_discovery.hpp"
#include "autog/pipeline.hpp"
#include "autog/planner.hpp"
#include "autog/profile.hpp"
#include "autog/synth.hpp"
#include "autog/table_io.hpp"
#include "autog/util.hpp"

namespace fs = std::filesystem;
using namespace autog;

namespace {

/// Tracks artifacts so a failing subcommand leaves no partial output behind.
class ArtifactTracker {
 public:
  void created(const fs::path& path) { paths_.push_back(path); }
  std::string track_write(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << content;
    created(path);
    return path.string();
  }
  void keep() { paths_.clear(); }
  ~ArtifactTracker() {
    for (const auto& path : paths_) {
      std::error_code ec;
      fs::remove_all(path, ec);
    }
  }

 private:
  std::vector<fs::path> paths_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Database load_db(const std::string& schema_path, const std::string& data_root) {
  auto schema = parse_schema(slurp(schema_path));
  const auto root =
      data_root.empty() ? fs::path(schema_path).parent_path().string() : data_root;
  auto tables = load_dataset(schema, root);
  return make_database(std::move(schema), std::move(tables));
}

void write_manifest(ArtifactTracker& tracker, const fs::path& out_dir,
                    const std::string& command, std::uint64_t seed,
                    const std::vector<std::string>& inputs) {
  nlohmann::ordered_json manifest;
  manifest["command"] = command;
  manifest["seed"] = seed;
  nlohmann::ordered_json fingerprints = nlohmann::ordered_json::object();
  for (const auto& input : inputs) fingerprints[input] = file_fingerprint(input);
  manifest["inputs"] = fingerprints;
  tracker.track_write(out_dir / "manifest.json", manifest.dump(2) + "\n");
}

std::vector<Action> read_action_script(const std::string& path) {
  const auto text = slurp(path);
  const auto parsed = nlohmann::json::parse(text);
  if (parsed.is_object() && parsed.contains("actions")) {
    // answer-key files wrap the script
    std::vector<Action> actions;
    for (const auto& entry : parsed["actions"]) actions.push_back(Action::from_json(entry));
    return actions;
  }
  return parse_action_script(text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"AutoG tabular-to-graph construction pipeline"};
  app.require_subcommand(1);

  std::string schema_path, data_root, task_path, out_dir = "out", client_spec, config_path;
  std::string basket_path;
  std::string mode = "both";
  std::size_t runs = 1, top_n = 20;
  double budget = 0.1;
  std::uint64_t seed = 0;

  auto add_common = [&](CLI::App* cmd, bool with_client) {
    cmd->add_option("--schema", schema_path, "schema YAML file");
    cmd->add_option("--data", data_root, "data root directory");
    cmd->add_option("--task", task_path, "tasks JSON file");
    cmd->add_option("--mode", mode, "row2node|row2node_edge|both");
    cmd->add_option("--runs", runs, "AutoG-A run count (1 = AutoG-S)");
    cmd->add_option("--budget", budget, "early-stage budget fraction");
    cmd->add_option("--seed", seed, "global seed");
    cmd->add_option("--out", out_dir, "output directory");
    cmd->add_option("--config", config_path, "YAML config mirroring flags (flags win)");
    if (with_client) {
      cmd->add_option("--client", client_spec, "replay:PATH or live:PROFILE");
    }
  };

  auto* cmd_profile = app.add_subcommand("profile", "column statistics report");
  add_common(cmd_profile, false);
  auto* cmd_infer = app.add_subcommand("infer-types", "rule-based (or LLM) type inference");
  add_common(cmd_infer, true);
  auto* cmd_similarity = app.add_subcommand("similarity", "ranked column-pair similarity");
  std::string method = "embedding";
  add_common(cmd_similarity, false);
  cmd_similarity->add_option("--method", method, "embedding|overlap");
  cmd_similarity->add_option("--top", top_n, "pairs to keep");

  auto* cmd_apply = app.add_subcommand("apply", "apply an action script");
  std::string apply_schema, apply_script_path;
  cmd_apply->add_option("schema_file", apply_schema, "schema YAML file")->required();
  cmd_apply->add_option("script_file", apply_script_path, "action script or answer key JSON")
      ->required();
  add_common(cmd_apply, false);

  auto* cmd_plan = app.add_subcommand("plan", "run the planner loop");
  std::string replay_path;
  add_common(cmd_plan, true);
  cmd_plan->add_option("--replay", replay_path, "shorthand for --client replay:PATH");

  auto* cmd_build = app.add_subcommand("build-graph", "construct heterogeneous graphs");
  add_common(cmd_build, false);
  auto* cmd_evaluate = app.add_subcommand("evaluate", "score candidate graphs");
  add_common(cmd_evaluate, false);
  cmd_evaluate->add_option("--basket", basket_path, "scorer basket JSON (external oracles attach here)");

  auto* cmd_compare = app.add_subcommand("compare", "Kendall distance between two rankings");
  std::string rank_a_path, rank_b_path;
  cmd_compare->add_option("rank_a", rank_a_path, "ranking JSON (array of ids)")->required();
  cmd_compare->add_option("rank_b", rank_b_path, "ranking JSON (array of ids)")->required();
  cmd_compare->add_option("--out", out_dir, "output directory");

  auto* cmd_synth = app.add_subcommand("synth", "generate a planted-challenge dataset");
  std::size_t papers = 200, authors = 60;
  bool no_c1 = false, no_c2 = false, no_c3 = false, no_c4 = false, anonymize_flag = false;
  add_common(cmd_synth, false);
  cmd_synth->add_option("--papers", papers, "paper rows");
  cmd_synth->add_option("--authors", authors, "author rows");
  cmd_synth->add_flag("--no-c1", no_c1, "disable renamed-FK challenge");
  cmd_synth->add_flag("--no-c2", no_c2, "disable self-induced-relation challenge");
  cmd_synth->add_flag("--no-c3", no_c3, "disable spurious-PK challenge");
  cmd_synth->add_flag("--no-c4", no_c4, "disable dual-task challenge");
  cmd_synth->add_flag("--anonymize", anonymize_flag, "emit anonymized names");

  auto* cmd_run = app.add_subcommand("run", "end-to-end pipeline");
  add_common(cmd_run, true);
  cmd_run->add_option("--basket", basket_path, "scorer basket JSON (external oracles attach here)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  // Config file fills in flags the command line left unset.
  if (!config_path.empty()) {
    try {
      const auto config = load_run_config(config_path);
      auto fill = [](std::string& flag, const std::string& value) {
        if (flag.empty() && !value.empty()) flag = value;
      };
      fill(schema_path, config.schema_path);
      fill(data_root, config.data_root);
      fill(task_path, config.task_path);
      fill(client_spec, config.client_kind.empty()
                            ? ""
                            : config.client_kind + ":" + config.client_arg);
      if (app.get_subcommand()->count("--mode") == 0) mode = config.mode;
      if (app.get_subcommand()->count("--runs") == 0) runs = config.runs;
      if (app.get_subcommand()->count("--budget") == 0) budget = config.budget;
      if (app.get_subcommand()->count("--seed") == 0) seed = config.seed;
      if (app.get_subcommand()->count("--out") == 0 && !config.out_dir.empty()) {
        out_dir = config.out_dir;
      }
    } catch (const std::exception& e) {
      std::cerr << "autog: " << e.what() << "\n";
      return 2;
    }
  }

  ArtifactTracker tracker;
  const fs::path out(out_dir);
  try {
    if (cmd_profile->parsed()) {
      auto db = load_db(schema_path, data_root);
      const auto profiles = profile_dataset(db.schema, db.tables, 5, seed);
      tracker.track_write(out / "stats_report.txt", render_stats_report(db.schema, profiles));
      write_manifest(tracker, out, "profile", seed, {schema_path});
    } else if (cmd_infer->parsed()) {
      auto db = load_db(schema_path, data_root);
      const auto profiles = profile_dataset(db.schema, db.tables, 5, seed);
      auto guesses = infer_dataset_types(profiles);
      bool llm_used = false;
      if (!client_spec.empty()) {
        RunConfig rc;
        const auto colon = client_spec.find(':');
        rc.client_kind = client_spec.substr(0, colon);
        rc.client_arg = colon == std::string::npos ? "" : client_spec.substr(colon + 1);
        rc.seed = seed;
        auto client = make_client(rc, 0);
        const auto inference =
            infer_types_llm(*client, render_stats_report(db.schema, profiles), guesses);
        guesses = inference.guesses;
        llm_used = !inference.fallback_used;
        for (const auto& note : inference.notes) std::cerr << "autog: " << note << "\n";
      }
      nlohmann::ordered_json rendered;
      rendered["llm_used"] = llm_used;
      for (const auto& [table, columns] : guesses) {
        for (const auto& [column, guess] : columns) {
          rendered["types"][table][column] = {{"dtype", dtype_to_string(guess.dtype)},
                                              {"confidence", guess.confidence},
                                              {"description", guess.description}};
        }
      }
      tracker.track_write(out / "inferred_types.json", rendered.dump(2) + "\n");
      write_manifest(tracker, out, "infer-types", seed, {schema_path});
    } else if (cmd_similarity->parsed()) {
      auto db = load_db(schema_path, data_root);
      const auto profiles = profile_dataset(db.schema, db.tables, 5, seed);
      const auto ranked = rank_pairs(
          db.schema, profiles, &db.tables,
          method == "overlap" ? SimilarityMethod::kOverlap : SimilarityMethod::kEmbedding, top_n);
      tracker.track_write(out / "similarity_report.txt", ranked.report);
      nlohmann::ordered_json pairs = nlohmann::ordered_json::array();
      for (const auto& pair : ranked.pairs) {
        pairs.push_back({{"a", pair.a.table + "." + pair.a.column},
                         {"b", pair.b.table + "." + pair.b.column},
                         {"score", pair.score}});
      }
      tracker.track_write(out / "similarity_pairs.json", pairs.dump(2) + "\n");
      write_manifest(tracker, out, "similarity", seed, {schema_path});
    } else if (cmd_apply->parsed()) {
      auto db = load_db(apply_schema, data_root);
      const auto actions = read_action_script(apply_script_path);
      const auto result = apply_script(db, actions);
      if (!result.ok()) {
        throw IoError("action " + std::to_string(result.error_step) + " failed (" +
                      result.error->code + "): " + result.error->message);
      }
      tracker.track_write(out / "schema_after.yaml", serialize_schema(result.after.schema));
      for (const auto& [name, data] : result.after.tables) {
        tracker.track_write(out / "tables" / (name + ".csv"), csv_to_string(data));
      }
      for (const auto& [name, data] : result.after.dummies) {
        tracker.track_write(out / "dummies" / (name + ".csv"), csv_to_string(data));
      }
      tracker.track_write(out / "apply_log.txt", join(result.step_logs, "\n") + "\n");
      write_manifest(tracker, out, "apply", seed, {apply_schema, apply_script_path});
      const auto violations = validate_schema(result.after.schema);
      if (!violations.empty()) throw IoError("augmented schema has violations");
    } else if (cmd_plan->parsed()) {
      if (!replay_path.empty()) client_spec = "replay:" + replay_path;
      auto db = load_db(schema_path, data_root);
      auto task = load_task_file(task_path);
      task.seed = seed;
      RunConfig rc;
      const auto colon = client_spec.find(':');
      rc.client_kind = client_spec.substr(0, colon);
      rc.client_arg = colon == std::string::npos ? "" : client_spec.substr(colon + 1);
      rc.seed = seed;
      SessionOptions options;
      options.profile_seed = seed;
      auto client = make_client(rc, 0);
      const auto session = run_autog_s(db, task, *client, options);
      if (session.session_error) throw IoError(*session.session_error);
      tracker.track_write(out / "transcript.jsonl", session.transcript_jsonl());
      tracker.track_write(out / "actions.json", serialize_action_script(session.applied));
      tracker.track_write(out / "schema_after.yaml", serialize_schema(session.db.schema));
      tracker.track_write(out / "session_log.txt", join(session.logs, "\n") + "\n");
      write_manifest(tracker, out, "plan", seed, {schema_path, task_path});
    } else if (cmd_build->parsed()) {
      auto db = load_db(schema_path, data_root);
      std::vector<BuildMode> modes;
      if (mode == "row2node") modes = {BuildMode::kRow2Node};
      else if (mode == "row2node_edge") modes = {BuildMode::kRow2NodeEdge};
      else modes = {BuildMode::kRow2Node, BuildMode::kRow2NodeEdge};
      for (const auto m : modes) {
        std::vector<std::string> warnings;
        const auto graph = build_graph(db, m, &warnings);
        const auto dir = out / ("graph_" + build_mode_to_string(m));
        export_graph(graph, dir.string());
        tracker.created(dir);
        const auto summary = graph_summary(graph);
        tracker.track_write(dir / "summary.txt", summary.text);
        tracker.track_write(dir / "summary.json", summary.manifest.dump(2) + "\n");
        for (const auto& warning : warnings) std::cerr << "autog: " << warning << "\n";
      }
      write_manifest(tracker, out, "build-graph", seed, {schema_path});
    } else if (cmd_evaluate->parsed()) {
      auto db = load_db(schema_path, data_root);
      auto task = load_task_file(task_path);
      task.seed = seed;
      std::vector<BuildMode> modes;
      if (mode == "row2node") modes = {BuildMode::kRow2Node};
      else if (mode == "row2node_edge") modes = {BuildMode::kRow2NodeEdge};
      else modes = {BuildMode::kRow2Node, BuildMode::kRow2NodeEdge};
      const auto basket = load_basket(basket_path, budget);
      bool needs_export = false;
      for (const auto& scorer : basket) {
        if (scorer.kind == ScorerConfig::Kind::kExternal) needs_export = true;
      }
      nlohmann::ordered_json reports = nlohmann::ordered_json::array();
      for (const auto m : modes) {
        const auto graph = build_graph(db, m);
        std::string graph_dir;
        if (needs_export) {
          graph_dir = (out / ("graph_" + build_mode_to_string(m))).string();
          export_graph(graph, graph_dir);
          tracker.created(out / ("graph_" + build_mode_to_string(m)));
        }
        const auto report =
            score_candidate(graph, task, basket, build_mode_to_string(m), graph_dir);
        reports.push_back(report.to_json());
      }
      tracker.track_write(out / "oracle_reports.json", reports.dump(2) + "\n");
      write_manifest(tracker, out, "evaluate", seed, {schema_path, task_path});
    } else if (cmd_compare->parsed()) {
      const auto rank_a = nlohmann::json::parse(slurp(rank_a_path)).get<std::vector<std::string>>();
      const auto rank_b = nlohmann::json::parse(slurp(rank_b_path)).get<std::vector<std::string>>();
      const auto distance = kendall_tau_distance(rank_a, rank_b);
      nlohmann::ordered_json comparison;
      comparison["kendall_tau_distance"] = distance;
      tracker.track_write(out / "comparison.json", comparison.dump(2) + "\n");
      write_manifest(tracker, out, "compare", 0, {rank_a_path, rank_b_path});
      std::cout << format_double(distance, 6) << "\n";
    } else if (cmd_synth->parsed()) {
      BenchSpec spec;
      spec.seed = seed;
      spec.n_papers = papers;
      spec.n_authors = authors;
      spec.c1_renamed_fk = !no_c1;
      spec.c2_self_induced = !no_c2;
      spec.c3_edge_table_with_spurious_pk = !no_c3;
      spec.c4_dual_tasks = !no_c4;
      auto dataset = generate(spec);
      if (anonymize_flag) {
        auto anonymized = anonymize(dataset.db, dataset.tasks, seed);
        nlohmann::ordered_json map_json(anonymized.name_map);
        dataset.db = std::move(anonymized.db);
        dataset.tasks = std::move(anonymized.tasks);
        write_synth_dataset(dataset, out.string());
        tracker.created(out / "schema.yaml");
        tracker.track_write(out / "name_map.json", map_json.dump(2) + "\n");
      } else {
        write_synth_dataset(dataset, out.string());
        tracker.created(out / "schema.yaml");
      }
      write_manifest(tracker, out, "synth", seed, {});
    } else if (cmd_run->parsed()) {
      RunConfig rc;
      rc.schema_path = schema_path;
      rc.data_root = data_root;
      rc.task_path = task_path;
      rc.mode = mode;
      rc.runs = runs;
      rc.budget = budget;
      rc.seed = seed;
      rc.basket_path = basket_path;
      rc.out_dir = out_dir;
      const auto colon = client_spec.find(':');
      rc.client_kind = client_spec.substr(0, colon);
      rc.client_arg = colon == std::string::npos ? "" : client_spec.substr(colon + 1);
      const auto result = run_end_to_end(rc);
      if (!result.ok) {
        for (const auto& status : result.stages) {
          if (!status.ok) {
            std::cerr << "autog: stage '" << status.stage << "' failed: " << status.error << "\n";
          }
        }
        tracker.keep();  // summary/manifest are the record of the failure
        return 1;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "autog: " << e.what() << "\n";
    return 1;
  }
  tracker.keep();
  return 0;
}
