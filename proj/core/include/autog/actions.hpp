#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "autog/schema.hpp"
#include "autog/value.hpp"

#include "json.hpp"

namespace autog {

enum class ActionKind {
  kGenerateOrConnectDummyTable,
  kConnectTwoColumns,
  kExplodeMultiCategoryColumn,
  kGenerateNonDummyTable,
  kRemovePrimaryKey,
  kAddPrimaryKey,
  kNone,
};

std::string action_kind_to_string(ActionKind kind);
std::optional<ActionKind> action_kind_from_string(const std::string& text);

/// One schema transformation. Parameter names follow the action documents
/// exactly (base_table_name, orig_col_name, table_1_name, cols, ...); values
/// arrive as strings (or string lists for `cols`) and are validated at apply
/// time so planner mistakes come back as actionable errors.
struct Action {
  ActionKind kind = ActionKind::kNone;
  std::map<std::string, nlohmann::json> parameters;
  std::string explanation;

  std::string param(const std::string& name) const;  // "" when absent
  bool has_param(const std::string& name) const;

  nlohmann::ordered_json to_json() const;
  static Action from_json(const nlohmann::json& value);
};

/// Schema plus payload; dummy tables carry their key spaces as single-column
/// payloads so codes can always be decoded back to original values.
///
/// Foreign-key cell convention: an FK into a dummy table holds the integer
/// code (the dummy row index); an FK into a declared table holds the target's
/// primary-key value.
struct Database {
  DatasetSchema schema;
  std::map<std::string, TableData> tables;   // declared tables
  std::map<std::string, TableData> dummies;  // dummy key spaces, code = row index

  const TableData& table(const std::string& name) const { return tables.at(name); }
  TableData& table(const std::string& name) { return tables.at(name); }
};

/// Bootstraps a Database from a parsed schema and freshly loaded payloads:
/// resolves links, builds the key space of every pre-declared dummy table
/// from the union of its inbound foreign-key values, and recodes those FK
/// cells to integer codes.
Database make_database(DatasetSchema schema, std::map<std::string, TableData> tables);

struct ActionError {
  std::string code;     // machine-readable: "missing-parameter", "referenced-pk", ...
  std::string message;  // the line fed back to the planner
};

struct ApplyResult {
  Database after;          // meaningful iff !error
  std::string log;
  std::vector<std::string> warnings;
  std::optional<ActionError> error;
  bool terminal = false;   // set by the `none` action

  bool ok() const { return !error.has_value(); }
};

// The six closed-ended transformations. Inputs are immutable; results carry
// a fresh Database.
ApplyResult apply_generate_or_connect_dummy_table(const Database& state,
                                                  const std::string& base_table,
                                                  const std::string& orig_col,
                                                  const std::string& new_table,
                                                  const std::string& new_col);
ApplyResult apply_connect_two_columns(const Database& state, const std::string& table_1,
                                      const std::string& column_1, const std::string& table_2,
                                      const std::string& column_2,
                                      const std::string& new_table_name = "",
                                      const std::string& new_col_name = "");
ApplyResult apply_explode_multi_category_column(const Database& state,
                                                const std::string& original_table,
                                                const std::string& multi_cat_col,
                                                const std::string& primary_key_column,
                                                const std::string& new_table_name,
                                                const std::string& new_col_name,
                                                const std::string& dtype);
ApplyResult apply_generate_non_dummy_table(const Database& state, const std::string& base_table,
                                           const std::vector<std::string>& cols,
                                           const std::string& new_table_name);
ApplyResult apply_remove_primary_key(const Database& state, const std::string& base_table,
                                     const std::string& col_name);
ApplyResult apply_add_primary_key(const Database& state, const std::string& base_table,
                                  const std::string& col_name);

/// Dispatcher. `none` returns the state unchanged with the terminal flag.
/// Every successful application re-validates the schema; a violation after a
/// transformation is reported as an internal error rather than let through.
ApplyResult apply_action(const Database& state, const Action& action);

struct ScriptResult {
  Database after;
  std::vector<std::string> step_logs;
  std::vector<std::string> warnings;
  std::optional<ActionError> error;
  std::size_t error_step = 0;  // 1-based index of the failing action
  bool terminal = false;

  bool ok() const { return !error.has_value(); }
};

/// Left fold of apply_action; stops at the first error or at `none`.
ScriptResult apply_script(const Database& state, const std::vector<Action>& actions);

/// Action scripts on disk: a JSON array of {explanation, action, parameters}
/// objects, byte-compatible with the planner's <selection> payload.
std::vector<Action> parse_action_script(const std::string& json_text);
std::string serialize_action_script(const std::vector<Action>& actions);

}  // namespace autog
