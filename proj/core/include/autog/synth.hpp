#pragma once

#include <map>
#include <string>
#include <vector>

#include "autog/actions.hpp"
#include "autog/oracle.hpp"

#include "json.hpp"

namespace autog {

/// Knobs for the planted-challenge generator. The four toggles mirror the
/// construction challenges: C1 renamed undeclared FK pairs, C2 self-induced
/// relations (category + multi-category), C3 an edge-shaped table with a
/// spurious dense primary key, C4 two labels (community-driven vs noise).
struct BenchSpec {
  std::uint64_t seed = 0;
  std::size_t n_papers = 200;
  std::size_t n_authors = 60;
  std::size_t communities = 4;
  std::size_t fields_per_community = 2;
  std::size_t keywords_per_community = 3;
  double flip_noise = 0.1;  // label/membership flip probability
  bool c1_renamed_fk = true;
  bool c2_self_induced = true;
  bool c3_edge_table_with_spurious_pk = true;
  bool c4_dual_tasks = true;

  void validate() const;  // throws ParseError on bad sizes / no challenges
};

struct KeyedAction {
  std::string challenge;  // "c1" | "c2" | "c3"
  Action action;
};

struct AnswerKey {
  std::vector<KeyedAction> actions;
  std::map<std::string, std::string> expected_roles;  // after ground-truth actions
  std::map<std::string, std::vector<std::string>> expected_metapaths;  // task -> relations
  std::string better_task;  // benefits from the planted relation
  std::string worse_task;   // does not

  nlohmann::ordered_json to_json() const;
  static AnswerKey from_json(const nlohmann::json& value);
};

struct SynthDataset {
  Database db;
  std::vector<Task> tasks;
  AnswerKey key;
};

SynthDataset generate(const BenchSpec& spec);

/// Writes schema.yaml, one CSV per table, tasks.json and answer_key.json.
void write_synth_dataset(const SynthDataset& dataset, const std::string& directory);

struct Anonymized {
  Database db;
  std::vector<Task> tasks;
  std::map<std::string, std::string> name_map;  // original -> token, "T" and "T.C" keys
};

/// Replaces every table and column name with an opaque seeded token; values
/// are untouched, so statistics reports agree with the original modulo names.
Anonymized anonymize(const Database& db, const std::vector<Task>& tasks, std::uint64_t seed);

/// Rewrites action names through an anonymization map (or its reverse), so
/// answer keys replay against anonymized datasets and recovered actions map
/// back for scoring.
std::vector<Action> translate_actions(const std::vector<Action>& actions,
                                      const std::map<std::string, std::string>& name_map);

struct RecoveryReport {
  // challenge -> (matched, expected)
  std::map<std::string, std::pair<std::size_t, std::size_t>> per_challenge;

  double fraction(const std::string& challenge) const;
  std::string render() const;  // "c1: 2/2  c2: 1/2  c3: 1/1"
};

/// Structural-effect matching: an applied action matches a key action when
/// its kind and its anchor parameters (the ones naming existing schema
/// objects) agree; planner-chosen names for new tables do not matter.
RecoveryReport score_against_key(const std::vector<Action>& applied, const AnswerKey& key);

}  // namespace autog
