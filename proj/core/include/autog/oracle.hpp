#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "autog/graph.hpp"

#include "json.hpp"

namespace autog {

enum class TaskObjective { kClassification, kLinkPrediction };
enum class TaskMetric { kAccuracy, kAuc, kMrr };

std::string metric_to_string(TaskMetric metric);
TaskMetric metric_from_string(const std::string& text);

struct Task {
  std::string name;
  std::string target_type;   // node type (classification) or edge type (link prediction)
  std::string label_column;  // classification only
  TaskObjective objective = TaskObjective::kClassification;
  double train_fraction = 0.6;
  double val_fraction = 0.2;
  std::uint64_t seed = 0;
  TaskMetric metric = TaskMetric::kAccuracy;
  std::string description;  // free text handed to the planner

  nlohmann::ordered_json to_json() const;
  static Task from_json(const nlohmann::json& value);
};

/// Undirected simple adjacency over one node type.
struct Projection {
  std::int64_t node_count = 0;
  std::vector<std::vector<std::int64_t>> neighbors;  // sorted, deduplicated, no self-loops
  std::int64_t edge_count = 0;                       // undirected pair count
};

/// Composes the relations of `path` (each step's destination feeding the next
/// step's source) and keeps pairs that start and end on `node_type`. Length 0
/// yields an empty adjacency. Throws ParseError when the path does not
/// compose or does not start/end at node_type.
Projection metapath_project(const HeteroGraph& graph, const std::string& node_type,
                            const std::vector<std::string>& path);

/// Union of every composable relation walk of length 1..max_hops that starts
/// and ends at node_type (self-reachable metapath neighborhood).
Projection neighborhood_projection(const HeteroGraph& graph, const std::string& node_type,
                                   std::size_t max_hops);

/// Degree-corrected edge homophily: (h_edge - sum_k p_k^2) / (1 - sum_k p_k^2)
/// with p_k the degree-weighted class share. Labels index by node; result in
/// [-1, 1]. Throws ParseError on an empty edge set or single-class labels.
double adjusted_homophily(const Projection& adjacency, const std::vector<std::int64_t>& labels);

struct LabelPropConfig {
  std::size_t hops = 1;
  double budget_fraction = 1.0;  // caps iterations at ceil(fraction * max_iters)
  std::size_t max_iters = 20;
};

/// Iterative majority-vote label propagation from the train split, scored
/// with the task metric on the validation split. Deterministic under
/// (graph, task, seed, budget). An edgeless graph degrades to the
/// majority-class baseline.
double label_prop_score(const HeteroGraph& graph, const Task& task,
                        const LabelPropConfig& config);

struct ScorerConfig {
  enum class Kind { kLabelProp, kHomophily, kExternal, kSampledLabelProp };
  Kind kind = Kind::kLabelProp;
  std::string name;
  LabelPropConfig label_prop;
  std::size_t homophily_hops = 2;
  std::vector<std::string> external_command;  // NDJSON wire oracle
  double sample_ratio = 0.3;                  // kSampledLabelProp only
};

/// The default proxy basket: 1-hop LP, 2-hop LP, and 2-hop metapath
/// homophily clamped to [0,1].
std::vector<ScorerConfig> default_basket(double budget_fraction);

struct OracleReport {
  std::string candidate_id;
  std::map<std::string, double> per_scorer;
  std::vector<std::string> failed_scorers;  // hard failures, recorded not fatal
  double aggregate = 0.0;                   // mean over surviving scorers
  bool degraded = false;                    // some scorer failed
  double budget_used = 1.0;
  std::size_t action_count = 0;             // rank tie-break metadata

  nlohmann::ordered_json to_json() const;
};

/// Runs every scorer in the basket and aggregates by arithmetic mean.
/// `graph_dir` is only needed when the basket contains external oracles.
OracleReport score_candidate(const HeteroGraph& graph, const Task& task,
                             const std::vector<ScorerConfig>& basket,
                             const std::string& candidate_id,
                             const std::string& graph_dir = "");

/// Descending aggregate; ties broken by fewer actions, then id.
std::vector<std::string> rank_candidates(const std::vector<OracleReport>& reports);

/// Discordant-pair fraction between two rankings of the same id set, in
/// [0,1]. Throws ParseError on mismatched sets or n < 2.
double kendall_tau_distance(const std::vector<std::string>& rank_a,
                            const std::vector<std::string>& rank_b);

/// External oracle wire protocol over subprocess stdio: one request
/// {"graph_dir","task","budget_fraction","seed"}, one response
/// {"score","metric"} or {"error"}.
double run_external_oracle(const std::vector<std::string>& command, const std::string& graph_dir,
                           const Task& task, double budget_fraction, std::uint64_t seed);

}  // namespace autog
