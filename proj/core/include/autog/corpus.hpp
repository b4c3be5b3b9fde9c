#pragma once

#include <map>
#include <string>
#include <vector>

#include "autog/actions.hpp"
#include "autog/oracle.hpp"
#include "autog/schema.hpp"

namespace autog::corpus {

// Fixed prompt assets. These strings are the single source of truth for the
// planner's default prompt sections and for the replay fixtures.
const std::string& action_docs();
const std::string& cot_example();
const std::string& augmentation_template();  // slots: {actions} {example} {history_actions} {stats} {task} {input_schema} {jtd}
const std::string& type_inference_prompt();
const std::string& reflection_instruction();

/// A named test asset: schema + synthesized payload (+ optional transcript
/// and tasks). Fixture payloads are regenerated deterministically, never
/// hand-edited.
struct Fixture {
  std::string name;
  Database db;
  std::vector<Task> tasks;
  std::string transcript_path;  // empty when the fixture has no transcript
  std::string root;             // directory with materialized files
};

/// Known names: "cot_paper_journal", "avs_min", "mag_five".
/// Materializes the fixture files under `temp_root` and loads them.
Fixture load_fixture(const std::string& name, const std::string& temp_root);

std::vector<std::string> fixture_names();

}  // namespace autog::corpus
