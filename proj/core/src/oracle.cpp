#include "autog/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "autog/subprocess.hpp"
#include "autog/util.hpp"

namespace autog {

std::string metric_to_string(TaskMetric metric) {
  switch (metric) {
    case TaskMetric::kAccuracy: return "accuracy";
    case TaskMetric::kAuc: return "auc";
    case TaskMetric::kMrr: return "mrr";
  }
  return "accuracy";
}

TaskMetric metric_from_string(const std::string& text) {
  if (text == "accuracy") return TaskMetric::kAccuracy;
  if (text == "auc") return TaskMetric::kAuc;
  if (text == "mrr") return TaskMetric::kMrr;
  throw ParseError("unknown metric '" + text + "'");
}

nlohmann::ordered_json Task::to_json() const {
  nlohmann::ordered_json out;
  out["name"] = name;
  out["target_type"] = target_type;
  out["label_column"] = label_column;
  out["objective"] =
      objective == TaskObjective::kClassification ? "classification" : "link_prediction";
  out["metric"] = metric_to_string(metric);
  out["split"] = {{"train", train_fraction}, {"val", val_fraction}, {"seed", seed}};
  out["description"] = description;
  return out;
}

Task Task::from_json(const nlohmann::json& value) {
  Task task;
  task.name = value.value("name", "task");
  task.target_type = value.at("target_type").get<std::string>();
  task.label_column = value.value("label_column", "");
  const auto objective = value.value("objective", "classification");
  if (objective == "classification") task.objective = TaskObjective::kClassification;
  else if (objective == "link_prediction") task.objective = TaskObjective::kLinkPrediction;
  else throw ParseError("unknown objective '" + objective + "'");
  task.metric = metric_from_string(value.value("metric", "accuracy"));
  if (value.contains("split")) {
    const auto& split = value["split"];
    task.train_fraction = split.value("train", 0.6);
    task.val_fraction = split.value("val", 0.2);
    task.seed = split.value("seed", std::uint64_t{0});
  }
  task.description = value.value("description", "");
  if (task.train_fraction <= 0 || task.val_fraction <= 0 ||
      task.train_fraction + task.val_fraction >= 1.0) {
    throw ParseError("split fractions must be in (0,1) and sum below 1");
  }
  return task;
}

namespace {

struct RelationView {
  const EdgeSet* edges = nullptr;
  std::vector<std::vector<std::int64_t>> adjacency;  // src index -> dst indexes
};

std::map<std::string, RelationView> relation_views(const HeteroGraph& graph) {
  std::map<std::string, RelationView> views;
  for (const auto& edge : graph.edges) {
    RelationView view;
    view.edges = &edge;
    const auto* src = graph.find_node(edge.source);
    view.adjacency.assign(static_cast<std::size_t>(src ? src->count : 0), {});
    for (const auto& [s, d] : edge.endpoints) {
      view.adjacency[static_cast<std::size_t>(s)].push_back(d);
    }
    views.emplace(edge.relation, std::move(view));
  }
  return views;
}

Projection pairs_to_projection(std::int64_t node_count,
                               const std::vector<std::set<std::int64_t>>& reached) {
  Projection projection;
  projection.node_count = node_count;
  projection.neighbors.assign(static_cast<std::size_t>(node_count), {});
  for (std::int64_t u = 0; u < node_count; ++u) {
    for (const auto v : reached[static_cast<std::size_t>(u)]) {
      if (v == u) continue;
      projection.neighbors[static_cast<std::size_t>(u)].push_back(v);
      projection.neighbors[static_cast<std::size_t>(v)].push_back(u);
    }
  }
  for (auto& list : projection.neighbors) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  std::int64_t degree_sum = 0;
  for (const auto& list : projection.neighbors) {
    degree_sum += static_cast<std::int64_t>(list.size());
  }
  projection.edge_count = degree_sum / 2;
  return projection;
}

}  // namespace

Projection metapath_project(const HeteroGraph& graph, const std::string& node_type,
                            const std::vector<std::string>& path) {
  const auto* start = graph.find_node(node_type);
  if (!start) throw ParseError("unknown node type '" + node_type + "'");
  Projection empty;
  empty.node_count = start->count;
  empty.neighbors.assign(static_cast<std::size_t>(start->count), {});
  if (path.empty()) return empty;

  const auto views = relation_views(graph);
  std::string current_type = node_type;
  // reached[u] = nodes of current_type reachable from start node u
  std::vector<std::set<std::int64_t>> reached(static_cast<std::size_t>(start->count));
  for (std::int64_t u = 0; u < start->count; ++u) {
    reached[static_cast<std::size_t>(u)].insert(u);
  }
  for (const auto& relation : path) {
    const auto it = views.find(relation);
    if (it == views.end()) throw ParseError("unknown relation '" + relation + "'");
    if (it->second.edges->source != current_type) {
      throw ParseError("metapath does not compose: relation '" + relation + "' starts at '" +
                       it->second.edges->source + "', walk is at '" + current_type + "'");
    }
    std::vector<std::set<std::int64_t>> next(reached.size());
    for (std::size_t u = 0; u < reached.size(); ++u) {
      for (const auto x : reached[u]) {
        for (const auto y : it->second.adjacency[static_cast<std::size_t>(x)]) {
          next[u].insert(y);
        }
      }
    }
    reached = std::move(next);
    current_type = it->second.edges->destination;
  }
  if (current_type != node_type) {
    throw ParseError("metapath must end at '" + node_type + "', ended at '" + current_type + "'");
  }
  return pairs_to_projection(start->count, reached);
}

Projection neighborhood_projection(const HeteroGraph& graph, const std::string& node_type,
                                   std::size_t max_hops) {
  const auto* start = graph.find_node(node_type);
  if (!start) throw ParseError("unknown node type '" + node_type + "'");
  const auto views = relation_views(graph);

  // Enumerate composable relation sequences of length 1..max_hops from
  // node_type back to node_type and union the projections.
  std::vector<std::set<std::int64_t>> reached(static_cast<std::size_t>(start->count));
  std::vector<std::vector<std::string>> frontier{{}};
  for (std::size_t hop = 1; hop <= max_hops; ++hop) {
    std::vector<std::vector<std::string>> next;
    for (const auto& prefix : frontier) {
      std::string at = node_type;
      if (!prefix.empty()) at = views.at(prefix.back()).edges->destination;
      for (const auto& [relation, view] : views) {
        if (view.edges->source != at) continue;
        auto sequence = prefix;
        sequence.push_back(relation);
        if (view.edges->destination == node_type) {
          const auto projection = metapath_project(graph, node_type, sequence);
          for (std::size_t u = 0; u < projection.neighbors.size(); ++u) {
            for (const auto v : projection.neighbors[u]) {
              reached[u].insert(v);
            }
          }
        }
        if (hop < max_hops) next.push_back(std::move(sequence));
      }
    }
    frontier = std::move(next);
  }
  return pairs_to_projection(start->count, reached);
}

double adjusted_homophily(const Projection& adjacency, const std::vector<std::int64_t>& labels) {
  if (adjacency.edge_count == 0) throw ParseError("adjusted homophily needs at least one edge");
  if (labels.size() != static_cast<std::size_t>(adjacency.node_count)) {
    throw ParseError("label vector does not match node count");
  }
  std::int64_t agreeing = 0;
  std::map<std::int64_t, std::int64_t> class_degree;
  for (std::int64_t u = 0; u < adjacency.node_count; ++u) {
    const auto& neighbors = adjacency.neighbors[static_cast<std::size_t>(u)];
    if (!neighbors.empty() && labels[static_cast<std::size_t>(u)] < 0) {
      throw ParseError("node " + std::to_string(u) + " has edges but no label");
    }
    class_degree[labels[static_cast<std::size_t>(u)]] +=
        static_cast<std::int64_t>(neighbors.size());
    for (const auto v : neighbors) {
      if (v <= u) continue;
      if (labels[static_cast<std::size_t>(u)] == labels[static_cast<std::size_t>(v)]) ++agreeing;
    }
  }
  const double edge_total = static_cast<double>(adjacency.edge_count);
  const double h_edge = static_cast<double>(agreeing) / edge_total;
  double class_share_sq = 0.0;
  for (const auto& [label, degree] : class_degree) {
    const double p = static_cast<double>(degree) / (2.0 * edge_total);
    class_share_sq += p * p;
  }
  const double denominator = 1.0 - class_share_sq;
  if (denominator <= 0.0) {
    throw ParseError("adjusted homophily undefined: single-class labeling");
  }
  return (h_edge - class_share_sq) / denominator;
}

namespace {

struct LabelColumn {
  std::vector<std::int64_t> classes;  // -1 = unlabeled
  std::size_t class_count = 0;
};

LabelColumn encode_labels(const NodeSet& node, const std::string& label_column) {
  if (!node.features.has_column(label_column)) {
    throw ParseError("node type '" + node.name + "' has no label column '" + label_column + "'");
  }
  const auto& cells = node.features.column(label_column).cells;
  // Deterministic class ids: sorted distinct rendered values.
  std::set<std::string> distinct;
  for (const auto& cell : cells) {
    if (!is_null(cell)) distinct.insert(cell_to_string(cell));
  }
  std::map<std::string, std::int64_t> ids;
  for (const auto& value : distinct) {
    ids.emplace(value, static_cast<std::int64_t>(ids.size()));
  }
  LabelColumn out;
  out.class_count = ids.size();
  out.classes.reserve(cells.size());
  for (const auto& cell : cells) {
    out.classes.push_back(is_null(cell) ? -1 : ids.at(cell_to_string(cell)));
  }
  return out;
}

struct Split {
  std::vector<std::int64_t> train;
  std::vector<std::int64_t> val;
};

Split split_labeled(const std::vector<std::int64_t>& classes, double train_fraction,
                    double val_fraction, std::uint64_t seed) {
  std::vector<std::int64_t> labeled;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i] >= 0) labeled.push_back(static_cast<std::int64_t>(i));
  }
  std::mt19937_64 rng(seed);
  shuffle_inplace(labeled, rng);
  const auto n_train = static_cast<std::size_t>(
      std::floor(train_fraction * static_cast<double>(labeled.size())));
  const auto n_val =
      static_cast<std::size_t>(std::floor(val_fraction * static_cast<double>(labeled.size())));
  if (n_train == 0 || n_val == 0) {
    throw ParseError("split produced an empty train or validation set");
  }
  Split split;
  split.train.assign(labeled.begin(), labeled.begin() + static_cast<std::ptrdiff_t>(n_train));
  split.val.assign(labeled.begin() + static_cast<std::ptrdiff_t>(n_train),
                   labeled.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  return split;
}

double binary_auc(const std::vector<double>& scores, const std::vector<int>& truths) {
  // Mann-Whitney with tie correction.
  std::size_t positives = 0;
  for (const int truth : truths) positives += truth;
  if (positives == 0 || positives == truths.size()) {
    throw ParseError("AUC undefined: single-class validation split");
  }
  double rank_sum = 0.0;
  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double mean_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) {
      if (truths[order[k]]) rank_sum += mean_rank;
    }
    i = j + 1;
  }
  const double pos = static_cast<double>(positives);
  const double neg = static_cast<double>(truths.size()) - pos;
  return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

double classification_score(const HeteroGraph& graph, const Task& task,
                            const LabelPropConfig& config) {
  const auto* target = graph.find_node(task.target_type);
  if (!target) throw ParseError("unknown target node type '" + task.target_type + "'");
  const auto labels = encode_labels(*target, task.label_column);
  if (labels.class_count < 2) throw ParseError("label column has fewer than two classes");
  const auto split = split_labeled(labels.classes, task.train_fraction, task.val_fraction,
                                   task.seed);
  const auto projection = neighborhood_projection(graph, task.target_type, config.hops);

  std::vector<std::int64_t> majority_count(labels.class_count, 0);
  for (const auto node : split.train) {
    ++majority_count[static_cast<std::size_t>(labels.classes[static_cast<std::size_t>(node)])];
  }
  const auto majority_class = static_cast<std::int64_t>(
      std::max_element(majority_count.begin(), majority_count.end()) - majority_count.begin());

  std::vector<std::int64_t> state(labels.classes.size(), -1);
  std::vector<bool> fixed(labels.classes.size(), false);
  for (const auto node : split.train) {
    state[static_cast<std::size_t>(node)] = labels.classes[static_cast<std::size_t>(node)];
    fixed[static_cast<std::size_t>(node)] = true;
  }

  const auto iterations = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::ceil(config.budget_fraction * static_cast<double>(config.max_iters))));
  std::vector<std::vector<double>> votes(labels.classes.size(),
                                         std::vector<double>(labels.class_count, 0.0));
  for (std::size_t iter = 0; iter < iterations; ++iter) {
    auto next = state;
    for (std::size_t u = 0; u < state.size(); ++u) {
      if (fixed[u]) continue;
      auto& tally = votes[u];
      std::fill(tally.begin(), tally.end(), 0.0);
      bool any = false;
      for (const auto v : projection.neighbors[u]) {
        const auto label = state[static_cast<std::size_t>(v)];
        if (label < 0) continue;
        tally[static_cast<std::size_t>(label)] += 1.0;
        any = true;
      }
      if (!any) continue;
      // Majority vote, smallest class id wins ties.
      std::size_t best = 0;
      for (std::size_t k = 1; k < tally.size(); ++k) {
        if (tally[k] > tally[best]) best = k;
      }
      next[u] = static_cast<std::int64_t>(best);
    }
    state = std::move(next);
  }

  if (task.metric == TaskMetric::kAccuracy) {
    std::size_t correct = 0;
    for (const auto node : split.val) {
      auto predicted = state[static_cast<std::size_t>(node)];
      if (predicted < 0) predicted = majority_class;
      if (predicted == labels.classes[static_cast<std::size_t>(node)]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(split.val.size());
  }
  if (task.metric == TaskMetric::kAuc) {
    if (labels.class_count != 2) {
      throw ParseError("AUC needs a binary label column");
    }
    std::vector<double> scores;
    std::vector<int> truths;
    for (const auto node : split.val) {
      const auto& tally = votes[static_cast<std::size_t>(node)];
      const double total = tally[0] + tally[1];
      scores.push_back(total > 0 ? tally[1] / total : 0.5);
      truths.push_back(labels.classes[static_cast<std::size_t>(node)] == 1 ? 1 : 0);
    }
    return binary_auc(scores, truths);
  }
  throw ParseError("MRR is a link-prediction metric");
}

double link_prediction_score(const HeteroGraph& graph, const Task& task,
                             const LabelPropConfig& config) {
  const auto* relation = graph.find_edge(task.target_type);
  if (!relation) throw ParseError("unknown target edge type '" + task.target_type + "'");
  const auto* dst_node = graph.find_node(relation->destination);
  if (!dst_node || dst_node->count == 0 || relation->endpoints.empty()) {
    throw ParseError("target edge type is empty");
  }

  std::vector<std::size_t> edge_order(relation->endpoints.size());
  for (std::size_t i = 0; i < edge_order.size(); ++i) edge_order[i] = i;
  std::mt19937_64 rng(task.seed);
  shuffle_inplace(edge_order, rng);
  const auto n_val = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::floor(task.val_fraction * static_cast<double>(edge_order.size()))));
  std::unordered_set<std::size_t> val_rows(edge_order.begin(),
                                           edge_order.begin() + static_cast<std::ptrdiff_t>(n_val));

  // Training adjacency = relation minus validation positives.
  std::unordered_map<std::int64_t, std::vector<std::int64_t>> forward;
  std::unordered_map<std::int64_t, std::vector<std::int64_t>> backward;
  for (std::size_t i = 0; i < relation->endpoints.size(); ++i) {
    if (val_rows.count(i)) continue;
    const auto& [s, d] = relation->endpoints[i];
    forward[s].push_back(d);
    backward[d].push_back(s);
  }

  const std::size_t negatives = 100;
  double reciprocal_sum = 0.0;
  std::size_t evaluated = 0;
  const auto iterations_unused = config.max_iters;
  (void)iterations_unused;
  for (const auto row : val_rows) {
    const auto& [u, v] = relation->endpoints[row];
    // Peers of u: sources sharing at least one destination (training edges).
    std::unordered_map<std::int64_t, std::int64_t> peer_count;
    for (const auto x : forward[u]) {
      for (const auto peer : backward[x]) {
        if (peer != u) ++peer_count[peer];
      }
    }
    auto score_of = [&](std::int64_t w) {
      double score = 0.0;
      for (const auto& [peer, weight] : peer_count) {
        const auto it = forward.find(peer);
        if (it == forward.end()) continue;
        for (const auto d : it->second) {
          if (d == w) score += static_cast<double>(weight);
        }
      }
      return score;
    };
    std::vector<std::int64_t> candidates{v};
    while (candidates.size() < negatives + 1) {
      const auto w = static_cast<std::int64_t>(
          bounded_uint(rng, static_cast<std::uint64_t>(dst_node->count)));
      if (w != v) candidates.push_back(w);
    }
    const double positive_score = score_of(v);
    double greater = 0.0, equal = 0.0;
    for (std::size_t c = 1; c < candidates.size(); ++c) {
      const double s = score_of(candidates[c]);
      if (s > positive_score) greater += 1.0;
      else if (s == positive_score) equal += 1.0;
    }
    reciprocal_sum += 1.0 / (1.0 + greater + equal / 2.0);
    ++evaluated;
  }
  return reciprocal_sum / static_cast<double>(evaluated);
}

}  // namespace

double label_prop_score(const HeteroGraph& graph, const Task& task,
                        const LabelPropConfig& config) {
  if (task.objective == TaskObjective::kLinkPrediction) {
    return link_prediction_score(graph, task, config);
  }
  return classification_score(graph, task, config);
}

std::vector<ScorerConfig> default_basket(double budget_fraction) {
  std::vector<ScorerConfig> basket;
  ScorerConfig lp1;
  lp1.kind = ScorerConfig::Kind::kLabelProp;
  lp1.name = "label_prop_1hop";
  lp1.label_prop = {1, budget_fraction, 20};
  basket.push_back(lp1);
  ScorerConfig lp2;
  lp2.kind = ScorerConfig::Kind::kLabelProp;
  lp2.name = "label_prop_2hop";
  lp2.label_prop = {2, budget_fraction, 20};
  basket.push_back(lp2);
  ScorerConfig homophily;
  homophily.kind = ScorerConfig::Kind::kHomophily;
  homophily.name = "metapath_homophily";
  homophily.homophily_hops = 2;
  basket.push_back(homophily);
  return basket;
}

namespace {

HeteroGraph sample_subgraph(const HeteroGraph& graph, double ratio, std::uint64_t seed) {
  HeteroGraph sampled;
  std::map<std::string, std::vector<std::int64_t>> remap;  // old index -> new or -1
  std::mt19937_64 rng(seed);
  for (const auto& node : graph.nodes) {
    const auto keep = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(ratio * static_cast<double>(node.count))));
    auto picked = sample_without_replacement(static_cast<std::size_t>(node.count), keep, rng);
    std::sort(picked.begin(), picked.end());
    std::vector<std::int64_t> mapping(static_cast<std::size_t>(node.count), -1);
    NodeSet kept;
    kept.name = node.name;
    kept.dummy = node.dummy;
    kept.count = static_cast<std::int64_t>(picked.size());
    kept.features.table_name = node.features.table_name;
    kept.features.row_count = picked.size();
    for (std::size_t c = 0; c < node.features.order.size(); ++c) {
      Column column;
      for (const auto row : picked) {
        column.cells.push_back(node.features.columns[c].cells[row]);
      }
      kept.features.add_column(node.features.order[c], std::move(column));
    }
    if (node.timestamps) {
      std::vector<std::string> stamps;
      for (const auto row : picked) stamps.push_back((*node.timestamps)[row]);
      kept.timestamps = std::move(stamps);
    }
    for (std::size_t i = 0; i < picked.size(); ++i) {
      mapping[picked[i]] = static_cast<std::int64_t>(i);
    }
    remap[node.name] = std::move(mapping);
    sampled.nodes.push_back(std::move(kept));
  }
  for (const auto& edge : graph.edges) {
    EdgeSet kept;
    kept.source = edge.source;
    kept.destination = edge.destination;
    kept.relation = edge.relation;
    kept.reverse_of_forward = edge.reverse_of_forward;
    kept.features.table_name = edge.features.table_name;
    const auto& src_map = remap.at(edge.source);
    const auto& dst_map = remap.at(edge.destination);
    for (const auto& [s, d] : edge.endpoints) {
      const auto ns = src_map[static_cast<std::size_t>(s)];
      const auto nd = dst_map[static_cast<std::size_t>(d)];
      if (ns >= 0 && nd >= 0) kept.endpoints.emplace_back(ns, nd);
    }
    sampled.edges.push_back(std::move(kept));
  }
  return sampled;
}

}  // namespace

OracleReport score_candidate(const HeteroGraph& graph, const Task& task,
                             const std::vector<ScorerConfig>& basket,
                             const std::string& candidate_id, const std::string& graph_dir) {
  if (basket.empty()) throw ParseError("scorer basket must not be empty");
  OracleReport report;
  report.candidate_id = candidate_id;
  double budget = 0.0;
  for (const auto& scorer : basket) {
    try {
      double score = 0.0;
      switch (scorer.kind) {
        case ScorerConfig::Kind::kLabelProp:
          score = label_prop_score(graph, task, scorer.label_prop);
          budget = std::max(budget, scorer.label_prop.budget_fraction);
          break;
        case ScorerConfig::Kind::kSampledLabelProp: {
          const auto sampled = sample_subgraph(graph, scorer.sample_ratio, task.seed);
          score = label_prop_score(sampled, task, scorer.label_prop);
          budget = std::max(budget, scorer.label_prop.budget_fraction);
          break;
        }
        case ScorerConfig::Kind::kHomophily: {
          const auto* target = graph.find_node(task.target_type);
          if (!target) throw ParseError("unknown target node type '" + task.target_type + "'");
          const auto labels = encode_labels(*target, task.label_column);
          const auto projection =
              neighborhood_projection(graph, task.target_type, scorer.homophily_hops);
          // Clamp to [0,1]: an uncorrelated relation scores ~0, comparable
          // with the label-propagation scorers.
          score = std::clamp(adjusted_homophily(projection, labels.classes), 0.0, 1.0);
          break;
        }
        case ScorerConfig::Kind::kExternal:
          score = run_external_oracle(scorer.external_command, graph_dir, task, 1.0, task.seed);
          budget = 1.0;
          break;
      }
      report.per_scorer[scorer.name] = score;
    } catch (const std::exception& e) {
      report.failed_scorers.push_back(scorer.name + ": " + e.what());
      report.degraded = true;
    }
  }
  if (report.per_scorer.empty()) {
    throw ParseError("every scorer in the basket failed for candidate '" + candidate_id + "'");
  }
  double sum = 0.0;
  for (const auto& [name, score] : report.per_scorer) sum += score;
  report.aggregate = sum / static_cast<double>(report.per_scorer.size());
  report.budget_used = budget > 0 ? budget : 1.0;
  return report;
}

nlohmann::ordered_json OracleReport::to_json() const {
  nlohmann::ordered_json out;
  out["candidate_id"] = candidate_id;
  out["per_scorer"] = per_scorer;
  out["aggregate"] = aggregate;
  out["budget_used"] = budget_used;
  out["degraded"] = degraded;
  out["failed_scorers"] = failed_scorers;
  out["action_count"] = action_count;
  return out;
}

std::vector<std::string> rank_candidates(const std::vector<OracleReport>& reports) {
  if (reports.empty()) throw ParseError("rank_candidates needs at least one report");
  std::vector<const OracleReport*> ordered;
  for (const auto& report : reports) ordered.push_back(&report);
  std::sort(ordered.begin(), ordered.end(), [](const OracleReport* a, const OracleReport* b) {
    if (a->aggregate != b->aggregate) return a->aggregate > b->aggregate;
    if (a->action_count != b->action_count) return a->action_count < b->action_count;
    return a->candidate_id < b->candidate_id;
  });
  std::vector<std::string> ranking;
  for (const auto* report : ordered) ranking.push_back(report->candidate_id);
  return ranking;
}

double kendall_tau_distance(const std::vector<std::string>& rank_a,
                            const std::vector<std::string>& rank_b) {
  if (rank_a.size() != rank_b.size() || rank_a.size() < 2) {
    throw ParseError("kendall distance needs two equal-size rankings with n >= 2");
  }
  std::map<std::string, std::size_t> position;
  for (std::size_t i = 0; i < rank_b.size(); ++i) {
    if (!position.emplace(rank_b[i], i).second) {
      throw ParseError("ranking contains duplicate id '" + rank_b[i] + "'");
    }
  }
  std::vector<std::size_t> mapped;
  mapped.reserve(rank_a.size());
  for (const auto& id : rank_a) {
    const auto it = position.find(id);
    if (it == position.end()) throw ParseError("rankings cover different id sets ('" + id + "')");
    mapped.push_back(it->second);
  }
  std::size_t discordant = 0;
  for (std::size_t i = 0; i < mapped.size(); ++i) {
    for (std::size_t j = i + 1; j < mapped.size(); ++j) {
      if (mapped[i] > mapped[j]) ++discordant;
    }
  }
  const double pairs =
      static_cast<double>(mapped.size()) * static_cast<double>(mapped.size() - 1) / 2.0;
  return static_cast<double>(discordant) / pairs;
}

double run_external_oracle(const std::vector<std::string>& command, const std::string& graph_dir,
                           const Task& task, double budget_fraction, std::uint64_t seed) {
  if (command.empty()) throw IoError("external oracle command is empty");
  Subprocess process(command);
  nlohmann::ordered_json request;
  request["graph_dir"] = graph_dir;
  request["task"] = task.to_json();
  request["budget_fraction"] = budget_fraction;
  request["seed"] = seed;
  process.write_line(request.dump());
  std::string line;
  if (!process.read_line(&line)) {
    throw IoError("external oracle closed its output stream");
  }
  const auto response = nlohmann::json::parse(line);
  if (response.contains("error")) {
    throw IoError("external oracle error: " + response["error"].get<std::string>());
  }
  return response.at("score").get<double>();
}

}  // namespace autog
