#include "autog/pipeline.hpp"

#include <yaml-cpp/yaml.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "autog/graph.hpp"
#include "autog/join_discovery.hpp"
#include "autog/profile.hpp"
#include "autog/table_io.hpp"
#include "autog/util.hpp"

namespace autog {

namespace fs = std::filesystem;

void RunConfig::validate() const {
  if (client_kind == "replay" && client_arg.empty()) {
    throw ParseError("replay client requires a transcript path");
  }
  if (client_kind == "live" && client_arg.empty()) {
    throw ParseError("live client requires a profile path");
  }
  if (mode != "row2node" && mode != "row2node_edge" && mode != "both") {
    throw ParseError("mode must be row2node, row2node_edge or both");
  }
  if (runs == 0) throw ParseError("runs must be at least 1");
}

RunConfig load_run_config(const std::string& path) {
  RunConfig config;
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::Exception& e) {
    throw ParseError("cannot read config '" + path + "': " + e.what());
  }
  auto get = [&](const char* key) -> std::string {
    return root[key] ? root[key].as<std::string>() : "";
  };
  config.schema_path = get("schema");
  config.data_root = get("data");
  config.task_path = get("task");
  config.basket_path = get("basket");
  config.out_dir = get("out");
  if (root["mode"]) config.mode = root["mode"].as<std::string>();
  if (root["runs"]) config.runs = root["runs"].as<std::size_t>();
  if (root["budget"]) config.budget = root["budget"].as<double>();
  if (root["seed"]) config.seed = root["seed"].as<std::uint64_t>();
  if (root["client"]) {
    const auto spec = root["client"].as<std::string>();
    const auto colon = spec.find(':');
    config.client_kind = spec.substr(0, colon);
    if (colon != std::string::npos) config.client_arg = spec.substr(colon + 1);
  }
  return config;
}

std::vector<ScorerConfig> load_basket(const std::string& path, double default_budget) {
  if (path.empty()) return default_basket(default_budget);
  std::ifstream in(path);
  if (!in) throw IoError("cannot open basket config '" + path + "'");
  nlohmann::json parsed;
  in >> parsed;
  if (!parsed.is_array() || parsed.empty()) {
    throw ParseError("basket config must be a non-empty JSON array");
  }
  std::vector<ScorerConfig> basket;
  for (const auto& entry : parsed) {
    ScorerConfig scorer;
    const auto kind = entry.value("kind", "label_prop");
    scorer.name = entry.value("name", kind);
    scorer.label_prop.hops = entry.value("hops", std::size_t{1});
    scorer.label_prop.budget_fraction = entry.value("budget_fraction", default_budget);
    scorer.label_prop.max_iters = entry.value("max_iters", std::size_t{20});
    if (kind == "label_prop") {
      scorer.kind = ScorerConfig::Kind::kLabelProp;
    } else if (kind == "homophily") {
      scorer.kind = ScorerConfig::Kind::kHomophily;
      scorer.homophily_hops = entry.value("hops", std::size_t{2});
    } else if (kind == "sampled_label_prop") {
      scorer.kind = ScorerConfig::Kind::kSampledLabelProp;
      scorer.sample_ratio = entry.value("sample_ratio", 0.3);
    } else if (kind == "external") {
      scorer.kind = ScorerConfig::Kind::kExternal;
      scorer.external_command = entry.at("command").get<std::vector<std::string>>();
    } else {
      throw ParseError("unknown scorer kind '" + kind + "' in basket config");
    }
    basket.push_back(std::move(scorer));
  }
  return basket;
}

std::string file_fingerprint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "missing";
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return to_hex(fnv1a64(buffer.str()));
}

std::vector<Task> load_all_tasks(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open task file '" + path + "'");
  nlohmann::json parsed;
  in >> parsed;
  std::vector<Task> tasks;
  if (parsed.is_array()) {
    for (const auto& entry : parsed) tasks.push_back(Task::from_json(entry));
  } else {
    tasks.push_back(Task::from_json(parsed));
  }
  return tasks;
}

Task load_task_file(const std::string& path, const std::string& name) {
  const auto tasks = load_all_tasks(path);
  if (tasks.empty()) throw ParseError("task file '" + path + "' holds no tasks");
  if (name.empty()) return tasks.front();
  for (const auto& task : tasks) {
    if (task.name == name) return task;
  }
  throw ParseError("no task named '" + name + "' in '" + path + "'");
}

std::unique_ptr<ChatClient> make_client(const RunConfig& config, std::size_t run_index) {
  if (config.client_kind == "replay") {
    fs::path path(config.client_arg);
    if (fs::is_directory(path)) {
      char file[32];
      std::snprintf(file, sizeof(file), "run%02zu.jsonl", run_index);
      path /= file;
    }
    return std::make_unique<ScriptedClient>(transcript_completions(path.string()));
  }
  if (config.client_kind == "live") {
    std::ifstream in(config.client_arg);
    if (!in) throw IoError("cannot open client profile '" + config.client_arg + "'");
    nlohmann::json profile;
    in >> profile;
    SubprocessChatClient::Options options;
    options.command = profile.at("command").get<std::vector<std::string>>();
    options.seed = profile.value("seed", config.seed) + run_index;
    options.temperature = profile.value("temperature", 0.0);
    options.retries = profile.value("retries", 1);
    return std::make_unique<SubprocessChatClient>(std::move(options));
  }
  throw ParseError("no client configured (use replay:PATH or live:PROFILE)");
}

namespace {

void write_text(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << content;
}

}  // namespace

EndToEndResult run_end_to_end(const RunConfig& config) {
  config.validate();
  EndToEndResult result;
  const fs::path out_dir(config.out_dir.empty() ? "." : config.out_dir);
  fs::create_directories(out_dir);

  nlohmann::ordered_json summary;
  summary["config"] = {{"schema", config.schema_path}, {"data", config.data_root},
                       {"task", config.task_path},     {"mode", config.mode},
                       {"runs", config.runs},          {"budget", config.budget},
                       {"seed", config.seed},          {"client", config.client_kind}};
  nlohmann::ordered_json manifest;
  manifest["inputs"] = {{"schema", file_fingerprint(config.schema_path)},
                        {"task", file_fingerprint(config.task_path)}};
  manifest["seed"] = config.seed;

  Database db;
  Task task;
  bool alive = true;
  auto stage = [&](const std::string& name, auto&& body) {
    if (!alive) {
      result.stages.push_back({name, false, "skipped: upstream stage failed"});
      return;
    }
    try {
      body();
      result.stages.push_back({name, true, ""});
    } catch (const std::exception& e) {
      result.stages.push_back({name, false, e.what()});
      alive = false;
      result.ok = false;
    }
  };

  stage("load", [&] {
    std::ifstream in(config.schema_path, std::ios::binary);
    if (!in) throw IoError("cannot open schema '" + config.schema_path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    auto schema = parse_schema(buffer.str());
    auto data_root = config.data_root.empty()
                         ? fs::path(config.schema_path).parent_path().string()
                         : config.data_root;
    auto tables = load_dataset(schema, data_root);
    db = make_database(std::move(schema), std::move(tables));
    task = load_task_file(config.task_path);
    task.seed = config.seed;
  });

  ProfileMap profiles;
  stage("profile", [&] {
    profiles = profile_dataset(db.schema, db.tables, 5, config.seed);
    write_text(out_dir / "stats_report.txt", render_stats_report(db.schema, profiles));
  });

  stage("infer", [&] {
    const auto guesses = infer_dataset_types(profiles);
    nlohmann::ordered_json rendered;
    for (const auto& [table, columns] : guesses) {
      for (const auto& [column, guess] : columns) {
        rendered[table][column] = {{"dtype", dtype_to_string(guess.dtype)},
                                   {"confidence", guess.confidence},
                                   {"description", guess.description}};
      }
    }
    write_text(out_dir / "inferred_types.json", rendered.dump(2) + "\n");
  });

  stage("similarity", [&] {
    const auto ranked =
        rank_pairs(db.schema, profiles, &db.tables, SimilarityMethod::kEmbedding, 20);
    write_text(out_dir / "similarity_report.txt", ranked.report);
  });

  SessionState best_session;
  BuildMode best_mode = BuildMode::kRow2NodeEdge;
  std::vector<OracleReport> reports;
  stage("plan", [&] {
    SessionOptions options;
    options.profile_seed = config.seed;
    if (config.runs == 1) {
      auto client = make_client(config, 0);
      best_session = run_autog_s(db, task, *client, options);
      if (best_session.session_error) {
        throw IoError("planner session failed: " + *best_session.session_error);
      }
    } else {
      auto factory = [&](std::size_t run) { return make_client(config, run); };
      auto autog_a = run_autog_a(db, task, factory, config.runs,
                                 load_basket(config.basket_path, config.budget), options);
      best_session = std::move(autog_a.best);
      best_mode = autog_a.best_mode;
      reports = std::move(autog_a.reports);
    }
    write_text(out_dir / "transcript.jsonl", best_session.transcript_jsonl());
    std::vector<Action> applied = best_session.applied;
    write_text(out_dir / "actions.json", serialize_action_script(applied));
    write_text(out_dir / "schema_after.yaml", serialize_schema(best_session.db.schema));
  });

  stage("build", [&] {
    std::vector<BuildMode> modes;
    if (config.mode == "row2node") modes = {BuildMode::kRow2Node};
    else if (config.mode == "row2node_edge") modes = {BuildMode::kRow2NodeEdge};
    else modes = {BuildMode::kRow2Node, BuildMode::kRow2NodeEdge};
    for (const auto mode : modes) {
      const auto graph = build_graph(best_session.db, mode);
      const auto dir = out_dir / ("graph_" + build_mode_to_string(mode));
      export_graph(graph, dir.string());
      write_text(dir / "summary.txt", graph_summary(graph).text);
    }
  });

  stage("evaluate", [&] {
    if (config.runs > 1 && !reports.empty()) return;  // AutoG-A already scored
    std::vector<BuildMode> modes;
    if (config.mode == "row2node") modes = {BuildMode::kRow2Node};
    else if (config.mode == "row2node_edge") modes = {BuildMode::kRow2NodeEdge};
    else modes = {BuildMode::kRow2Node, BuildMode::kRow2NodeEdge};
    std::optional<OracleReport> best;
    for (const auto mode : modes) {
      const auto graph = build_graph(best_session.db, mode);
      const auto dir = out_dir / ("graph_" + build_mode_to_string(mode));
      auto report = score_candidate(graph, task, load_basket(config.basket_path, config.budget),
                                    build_mode_to_string(mode), dir.string());
      report.action_count = best_session.applied.size();
      if (!best || report.aggregate > best->aggregate) {
        best = report;
        best_mode = mode;
      }
    }
    reports.push_back(std::move(*best));
  });

  stage("rank", [&] {
    nlohmann::ordered_json rendered = nlohmann::ordered_json::array();
    for (const auto& report : reports) rendered.push_back(report.to_json());
    write_text(out_dir / "oracle_reports.json", rendered.dump(2) + "\n");
    const auto ranking = rank_candidates(reports);
    nlohmann::ordered_json ranked(ranking);
    write_text(out_dir / "ranking.json", ranked.dump(2) + "\n");
    summary["winner"] = {{"candidate", ranking.front()},
                         {"mode", build_mode_to_string(best_mode)},
                         {"actions_applied", best_session.applied.size()}};
    nlohmann::ordered_json log = nlohmann::ordered_json::array();
    for (const auto& line : best_session.logs) log.push_back(line);
    summary["action_log"] = log;
    nlohmann::ordered_json scores = nlohmann::ordered_json::array();
    for (const auto& report : reports) scores.push_back(report.to_json());
    summary["scores"] = scores;
  });

  nlohmann::ordered_json stage_list = nlohmann::ordered_json::array();
  for (const auto& status : result.stages) {
    stage_list.push_back({{"stage", status.stage}, {"ok", status.ok}, {"error", status.error}});
  }
  summary["stages"] = stage_list;
  result.summary = summary;
  write_text(out_dir / "summary.json", summary.dump(2) + "\n");
  write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
  return result;
}

}  // namespace autog
