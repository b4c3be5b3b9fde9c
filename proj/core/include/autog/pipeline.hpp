#pragma once

#include <optional>
#include <string>
#include <vector>

#include "autog/actions.hpp"
#include "autog/oracle.hpp"
#include "autog/planner.hpp"

#include "json.hpp"

namespace autog {

struct RunConfig {
  std::string schema_path;
  std::string data_root;
  std::string task_path;
  std::string client_kind;  // "replay" | "live" | ""
  std::string client_arg;   // transcript path/dir or live profile path
  std::string mode = "both";  // row2node | row2node_edge | both
  std::size_t runs = 1;       // 1 = AutoG-S, >1 = AutoG-A
  double budget = 0.1;
  std::uint64_t seed = 0;
  std::string basket_path;  // optional scorer basket JSON
  std::string out_dir;

  void validate() const;  // replay needs a transcript, live needs a profile
};

/// Scorer basket from a JSON array. Entries: {"kind": "label_prop" |
/// "homophily" | "sampled_label_prop" | "external", "name", "hops",
/// "budget_fraction", "sample_ratio", "command": [...]}.
std::vector<ScorerConfig> load_basket(const std::string& path, double default_budget);

/// Parses flags-as-YAML config files; command-line flags win over file keys.
RunConfig load_run_config(const std::string& path);

struct StageStatus {
  std::string stage;
  bool ok = true;
  std::string error;
};

struct EndToEndResult {
  std::vector<StageStatus> stages;
  nlohmann::ordered_json summary;
  bool ok = true;
};

/// profile -> infer -> similarity -> plan -> build both modes -> evaluate ->
/// rank. Stage failures are recorded and downstream stages are skipped; the
/// summary and manifest are always written.
EndToEndResult run_end_to_end(const RunConfig& config);

/// Client factory honoring the RunConfig client settings. For replay, a
/// directory means per-run transcripts run00.jsonl...; a file replays the
/// same transcript in every run.
std::unique_ptr<ChatClient> make_client(const RunConfig& config, std::size_t run_index);

/// FNV-1a content fingerprint, "0x"-free fixed-width hex.
std::string file_fingerprint(const std::string& path);

/// Loads the first task (or the named one) from a tasks JSON file.
Task load_task_file(const std::string& path, const std::string& name = "");
std::vector<Task> load_all_tasks(const std::string& path);

}  // namespace autog
