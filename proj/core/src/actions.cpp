#include "autog/actions.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

#include "autog/util.hpp"

namespace autog {

std::string action_kind_to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::kGenerateOrConnectDummyTable: return "generate_or_connect_dummy_table";
    case ActionKind::kConnectTwoColumns: return "connect_two_columns";
    case ActionKind::kExplodeMultiCategoryColumn: return "explode_multi_category_column";
    case ActionKind::kGenerateNonDummyTable: return "generate_non_dummy_table";
    case ActionKind::kRemovePrimaryKey: return "remove_primary_key";
    case ActionKind::kAddPrimaryKey: return "add_primary_key";
    case ActionKind::kNone: return "none";
  }
  return "none";
}

std::optional<ActionKind> action_kind_from_string(const std::string& text) {
  if (text == "generate_or_connect_dummy_table") return ActionKind::kGenerateOrConnectDummyTable;
  if (text == "connect_two_columns") return ActionKind::kConnectTwoColumns;
  if (text == "explode_multi_category_column") return ActionKind::kExplodeMultiCategoryColumn;
  if (text == "generate_non_dummy_table") return ActionKind::kGenerateNonDummyTable;
  if (text == "remove_primary_key") return ActionKind::kRemovePrimaryKey;
  if (text == "add_primary_key") return ActionKind::kAddPrimaryKey;
  if (text == "none" || text == "None") return ActionKind::kNone;
  return std::nullopt;
}

std::string Action::param(const std::string& name) const {
  const auto it = parameters.find(name);
  if (it == parameters.end()) return "";
  if (it->second.is_string()) return it->second.get<std::string>();
  if (it->second.is_null()) return "";
  return it->second.dump();
}

bool Action::has_param(const std::string& name) const {
  const auto it = parameters.find(name);
  return it != parameters.end() && !it->second.is_null();
}

nlohmann::ordered_json Action::to_json() const {
  nlohmann::ordered_json out;
  out["explanation"] = explanation;
  out["action"] = action_kind_to_string(kind);
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const auto& [key, value] : parameters) params[key] = value;
  out["parameters"] = params;
  return out;
}

Action Action::from_json(const nlohmann::json& value) {
  Action action;
  if (!value.is_object()) throw ParseError("action entry must be an object");
  if (!value.contains("action") || !value["action"].is_string()) {
    throw ParseError("action entry has no 'action' name");
  }
  const auto kind = action_kind_from_string(value["action"].get<std::string>());
  if (!kind) throw ParseError("unknown action '" + value["action"].get<std::string>() + "'");
  action.kind = *kind;
  if (value.contains("explanation") && value["explanation"].is_string()) {
    action.explanation = value["explanation"].get<std::string>();
  }
  if (value.contains("parameters")) {
    if (!value["parameters"].is_object()) {
      throw ParseError("action 'parameters' must be an object");
    }
    for (const auto& [key, param] : value["parameters"].items()) {
      action.parameters[key] = param;
    }
  }
  return action;
}

namespace {

ApplyResult fail(const std::string& code, const std::string& message) {
  ApplyResult result;
  result.error = ActionError{code, message};
  return result;
}

std::string scalar_key(const Scalar& value) {
  // Type-tagged rendering so 1 and "1" never collide in a key space.
  if (is_null(value)) return "n:";
  if (const auto* i = std::get_if<std::int64_t>(&value)) return "i:" + std::to_string(*i);
  if (const auto* d = std::get_if<double>(&value)) return "r:" + scalar_to_string(*d);
  return "s:" + std::get<std::string>(value);
}

std::string cell_key(const Cell& cell) {
  if (is_tensor(cell)) {
    std::string key = "t:";
    for (const double v : std::get<std::vector<double>>(cell)) {
      key += scalar_to_string(v);
      key.push_back(',');
    }
    return key;
  }
  if (is_list(cell)) {
    std::string key = "l:";
    for (const auto& item : std::get<std::vector<Scalar>>(cell)) {
      key += scalar_key(item);
      key.push_back(',');
    }
    return key;
  }
  return scalar_key(cell_to_scalar(cell));
}

/// Growable value -> code mapping backed by the dummy payload column.
class KeySpace {
 public:
  explicit KeySpace(std::vector<Scalar> values) : values_(std::move(values)) {
    for (std::size_t i = 0; i < values_.size(); ++i) index_[scalar_key(values_[i])] = i;
  }

  std::optional<std::int64_t> code_of(const Scalar& value) const {
    const auto it = index_.find(scalar_key(value));
    if (it == index_.end()) return std::nullopt;
    return static_cast<std::int64_t>(it->second);
  }

  std::int64_t insert(const Scalar& value) {
    const auto key = scalar_key(value);
    const auto it = index_.find(key);
    if (it != index_.end()) return static_cast<std::int64_t>(it->second);
    values_.push_back(value);
    index_[key] = values_.size() - 1;
    return static_cast<std::int64_t>(values_.size() - 1);
  }

  const std::vector<Scalar>& values() const { return values_; }
  const Scalar& value_at(std::size_t code) const { return values_.at(code); }

 private:
  std::vector<Scalar> values_;
  std::unordered_map<std::string, std::size_t> index_;
};

KeySpace key_space_of_dummy(const Database& db, const std::string& dummy_name,
                            const std::string& key_column) {
  const auto it = db.dummies.find(dummy_name);
  if (it == db.dummies.end()) return KeySpace({});
  std::vector<Scalar> values;
  const auto& column = it->second.column(key_column);
  values.reserve(column.cells.size());
  for (const auto& cell : column.cells) values.push_back(cell_to_scalar(cell));
  return KeySpace(std::move(values));
}

void store_dummy(Database& db, const std::string& dummy_name, const std::string& key_column,
                 const KeySpace& space) {
  TableData payload;
  payload.table_name = dummy_name;
  Column column;
  for (const auto& value : space.values()) column.cells.push_back(scalar_to_cell(value));
  payload.add_column(key_column, std::move(column));
  payload.row_count = space.values().size();
  db.dummies[dummy_name] = std::move(payload);
}

/// Distinct non-null scalars of a column, first-occurrence order.
std::vector<Scalar> distinct_in_order(const Column& column) {
  std::vector<Scalar> out;
  std::unordered_map<std::string, bool> seen;
  for (const auto& cell : column.cells) {
    if (is_null(cell) || is_list(cell) || is_tensor(cell)) continue;
    const auto value = cell_to_scalar(cell);
    auto& flag = seen[scalar_key(value)];
    if (!flag) {
      flag = true;
      out.push_back(value);
    }
  }
  return out;
}

ApplyResult finish(Database after, std::string log, std::vector<std::string> warnings = {}) {
  try {
    after.schema = resolve_links(after.schema);
  } catch (const ParseError& e) {
    return fail("resolve-failed", e.what());
  }
  ApplyResult result;
  result.after = std::move(after);
  result.log = std::move(log);
  result.warnings = std::move(warnings);
  return result;
}

bool name_taken(const Database& db, const std::string& name) {
  return db.schema.has_table(name) || db.schema.find_dummy(name) != nullptr;
}

}  // namespace

Database make_database(DatasetSchema schema, std::map<std::string, TableData> tables) {
  Database db;
  db.schema = resolve_links(std::move(schema));
  db.tables = std::move(tables);
  for (const auto& dummy : db.schema.derived) {
    KeySpace space({});
    for (const auto& table : db.schema.tables) {
      for (const auto& column : table.columns) {
        if (column.dtype != DataType::kForeignKey || column.link_table() != dummy.name) continue;
        const auto it = db.tables.find(table.name);
        if (it == db.tables.end() || !it->second.has_column(column.name)) continue;
        auto& payload = it->second.column(column.name);
        for (auto& cell : payload.cells) {
          if (is_null(cell)) continue;
          cell = space.insert(cell_to_scalar(cell));
        }
      }
    }
    store_dummy(db, dummy.name, dummy.key_column, space);
  }
  return db;
}

ApplyResult apply_generate_or_connect_dummy_table(const Database& state,
                                                  const std::string& base_table,
                                                  const std::string& orig_col,
                                                  const std::string& new_table,
                                                  const std::string& new_col) {
  const auto* table = state.schema.find_table(base_table);
  if (!table) return fail("unknown-table", "table '" + base_table + "' does not exist");
  const auto* column = table->find_column(orig_col);
  if (!column) {
    return fail("unknown-column", "column '" + orig_col + "' does not exist in table '" +
                                      base_table + "'");
  }
  if (column->dtype == DataType::kForeignKey) {
    if (column->link_table() == new_table) {
      ApplyResult result;
      result.after = state;
      result.log = base_table + "." + orig_col + " is already connected to dummy table '" +
                   new_table + "'; no-op";
      return result;
    }
    return fail("column-already-fk", "column '" + orig_col + "' is already a foreign key into '" +
                                         column->link_table() + "'");
  }
  if (column->dtype != DataType::kCategory) {
    return fail("orig-col-not-category", "orig_col_name must be a column with category type");
  }
  if (!is_identifier(new_table) || !is_identifier(new_col)) {
    return fail("bad-identifier", "new_table_name and new_col_name must be identifiers");
  }
  if (state.schema.has_table(new_table)) {
    return fail("name-collision",
                "'" + new_table + "' is a declared table, not a dummy table");
  }

  Database after = state;
  std::vector<std::string> warnings;
  std::string key_column = new_col;
  if (const auto* dummy = state.schema.find_dummy(new_table)) {
    if (dummy->key_column != new_col) {
      warnings.push_back("dummy table '" + new_table + "' is keyed by '" + dummy->key_column +
                         "'; ignoring new_col_name '" + new_col + "'");
    }
    key_column = dummy->key_column;
  }

  KeySpace space = key_space_of_dummy(after, new_table, key_column);
  auto& payload = after.table(base_table).column(orig_col);
  std::size_t recoded = 0;
  for (auto& cell : payload.cells) {
    if (is_null(cell)) continue;
    cell = space.insert(cell_to_scalar(cell));
    ++recoded;
  }
  store_dummy(after, new_table, key_column, space);

  auto* def = after.schema.find_table(base_table)->find_column(orig_col);
  def->dtype = DataType::kForeignKey;
  def->link_to = new_table + "." + key_column;

  std::ostringstream log;
  log << "connected " << base_table << "." << orig_col << " to dummy table '" << new_table
      << "' (" << space.values().size() << " keys, " << recoded << " cells recoded)";
  return finish(std::move(after), log.str(), std::move(warnings));
}

namespace {

/// Maps a category column's payload into a declared table's PK domain.
/// Unmatched values become null-links; the count comes back via warning.
std::size_t recode_into_pk(Column& payload, const Column& pk_column) {
  std::unordered_map<std::string, Scalar> domain;
  for (const auto& cell : pk_column.cells) {
    if (is_null(cell)) continue;
    const auto value = cell_to_scalar(cell);
    domain.emplace(scalar_key(value), value);
  }
  std::size_t unmatched = 0;
  for (auto& cell : payload.cells) {
    if (is_null(cell)) continue;
    const auto it = domain.find(scalar_key(cell_to_scalar(cell)));
    if (it == domain.end()) {
      cell = Cell{};
      ++unmatched;
    } else {
      cell = scalar_to_cell(it->second);
    }
  }
  return unmatched;
}

/// Maps a column through a value->PK-value association built from another
/// column (case 3 resolved through the table's own primary key).
std::size_t recode_through_mapping(
    Column& payload, const std::unordered_map<std::string, Scalar>& mapping) {
  std::size_t unmatched = 0;
  for (auto& cell : payload.cells) {
    if (is_null(cell)) continue;
    const auto it = mapping.find(scalar_key(cell_to_scalar(cell)));
    if (it == mapping.end()) {
      cell = Cell{};
      ++unmatched;
    } else {
      cell = scalar_to_cell(it->second);
    }
  }
  return unmatched;
}

}  // namespace

ApplyResult apply_connect_two_columns(const Database& state, const std::string& table_1,
                                      const std::string& column_1, const std::string& table_2,
                                      const std::string& column_2,
                                      const std::string& new_table_name,
                                      const std::string& new_col_name) {
  if (table_1 == table_2 && column_1 == column_2) {
    return fail("self-connection", "cannot connect a column to itself");
  }
  const auto* t1 = state.schema.find_table(table_1);
  if (!t1) return fail("unknown-table", "table '" + table_1 + "' does not exist");
  const auto* t2 = state.schema.find_table(table_2);
  if (!t2) return fail("unknown-table", "table '" + table_2 + "' does not exist");
  const auto* c1 = t1->find_column(column_1);
  if (!c1) {
    return fail("unknown-column",
                "column '" + column_1 + "' does not exist in table '" + table_1 + "'");
  }
  const auto* c2 = t2->find_column(column_2);
  if (!c2) {
    return fail("unknown-column",
                "column '" + column_2 + "' does not exist in table '" + table_2 + "'");
  }

  // Case 4: table-1 column is already a foreign key; pull table 2 onto its
  // target and update every other FK pointing at an absorbed key space.
  if (c1->dtype == DataType::kForeignKey) {
    const auto target_table = c1->link_table();
    const auto target_column = c1->link_column();
    const bool target_is_dummy = state.schema.find_dummy(target_table) != nullptr;

    if (c2->dtype == DataType::kCategory) {
      Database after = state;
      std::vector<std::string> warnings;
      if (target_is_dummy) {
        KeySpace space = key_space_of_dummy(after, target_table, target_column);
        auto& payload = after.table(table_2).column(column_2);
        for (auto& cell : payload.cells) {
          if (is_null(cell)) continue;
          cell = space.insert(cell_to_scalar(cell));
        }
        store_dummy(after, target_table, target_column, space);
      } else {
        const auto unmatched = recode_into_pk(after.table(table_2).column(column_2),
                                              state.table(target_table).column(target_column));
        if (unmatched) {
          warnings.push_back("partial match: " + std::to_string(unmatched) + " values of " +
                             table_2 + "." + column_2 + " have no key in " + target_table +
                             "; they became null-links");
        }
      }
      auto* def = after.schema.find_table(table_2)->find_column(column_2);
      def->dtype = DataType::kForeignKey;
      def->link_to = target_table + "." + target_column;
      return finish(std::move(after),
                    "connected " + table_2 + "." + column_2 + " into the key space of " +
                        table_1 + "." + column_1 + " (" + target_table + ")",
                    std::move(warnings));
    }

    if (c2->dtype == DataType::kForeignKey) {
      const auto absorbed_table = c2->link_table();
      const auto absorbed_column = c2->link_column();
      if (absorbed_table == target_table) {
        ApplyResult result;
        result.after = state;
        result.log = "both columns already share target '" + target_table + "'; no-op";
        return result;
      }
      if (!state.schema.find_dummy(absorbed_table)) {
        return fail("cannot-absorb-declared",
                    "cannot merge declared table '" + absorbed_table +
                        "' into another key space; rows would need entity merging");
      }
      Database after = state;
      std::vector<std::string> warnings;
      const KeySpace absorbed = key_space_of_dummy(state, absorbed_table, absorbed_column);

      // Old code -> value -> new code (or PK value) for every FK that pointed
      // at the absorbed dummy.
      std::vector<Cell> translation(absorbed.values().size());
      if (target_is_dummy) {
        KeySpace space = key_space_of_dummy(after, target_table, target_column);
        for (std::size_t code = 0; code < absorbed.values().size(); ++code) {
          translation[code] = space.insert(absorbed.value_at(code));
        }
        store_dummy(after, target_table, target_column, space);
      } else {
        std::unordered_map<std::string, Scalar> domain;
        for (const auto& cell : state.table(target_table).column(target_column).cells) {
          if (is_null(cell)) continue;
          const auto value = cell_to_scalar(cell);
          domain.emplace(scalar_key(value), value);
        }
        std::size_t unmatched = 0;
        for (std::size_t code = 0; code < absorbed.values().size(); ++code) {
          const auto it = domain.find(scalar_key(absorbed.value_at(code)));
          if (it == domain.end()) {
            translation[code] = Cell{};
            ++unmatched;
          } else {
            translation[code] = scalar_to_cell(it->second);
          }
        }
        if (unmatched) {
          warnings.push_back("partial match: " + std::to_string(unmatched) + " keys of dummy '" +
                             absorbed_table + "' have no key in " + target_table +
                             "; their links became null-links");
        }
      }

      std::size_t relinked = 0;
      for (auto& table : after.schema.tables) {
        for (auto& column : table.columns) {
          if (column.dtype != DataType::kForeignKey || column.link_table() != absorbed_table) {
            continue;
          }
          auto& payload = after.table(table.name).column(column.name);
          for (auto& cell : payload.cells) {
            if (is_null(cell)) continue;
            const auto code = std::get<std::int64_t>(cell);
            cell = translation.at(static_cast<std::size_t>(code));
          }
          column.link_to = target_table + "." + target_column;
          ++relinked;
        }
      }
      after.dummies.erase(absorbed_table);
      return finish(std::move(after),
                    "merged dummy '" + absorbed_table + "' into '" + target_table + "' (" +
                        std::to_string(relinked) + " foreign-key columns re-linked)",
                    std::move(warnings));
    }
    return fail("incompatible-dtypes",
                "table-1 column is a foreign key; table-2 column must be category or "
                "foreign key, got " +
                    dtype_to_string(c2->dtype));
  }

  if (c1->dtype != DataType::kCategory) {
    return fail("table-1-not-category",
                "table_1_col_name must be a column with category type (or an existing "
                "foreign key), got " +
                    dtype_to_string(c1->dtype));
  }

  // Case 1: category-category. Both columns join a fresh (or named existing)
  // dummy key space built over the union of their domains.
  if (c2->dtype == DataType::kCategory) {
    std::string dummy_name = new_table_name.empty() ? column_1 : new_table_name;
    if (state.schema.has_table(dummy_name)) {
      return fail("name-collision", "'" + dummy_name + "' is a declared table");
    }
    std::string key_column = new_col_name.empty() ? dummy_name : new_col_name;
    if (const auto* dummy = state.schema.find_dummy(dummy_name)) {
      key_column = dummy->key_column;
    }
    if (!is_identifier(dummy_name) || !is_identifier(key_column)) {
      return fail("bad-identifier", "dummy table and key names must be identifiers");
    }
    Database after = state;
    KeySpace space = key_space_of_dummy(after, dummy_name, key_column);
    const std::pair<std::string, std::string> sides[] = {{table_1, column_1},
                                                         {table_2, column_2}};
    for (const auto& [side_table, side_column] : sides) {
      auto& payload = after.table(side_table).column(side_column);
      for (auto& cell : payload.cells) {
        if (is_null(cell)) continue;
        cell = space.insert(cell_to_scalar(cell));
      }
      auto* def = after.schema.find_table(side_table)->find_column(side_column);
      def->dtype = DataType::kForeignKey;
      def->link_to = dummy_name + "." + key_column;
    }
    store_dummy(after, dummy_name, key_column, space);
    return finish(std::move(after), "connected " + table_1 + "." + column_1 + " and " + table_2 +
                                        "." + column_2 + " through dummy table '" + dummy_name +
                                        "' (" + std::to_string(space.values().size()) + " keys)");
  }

  // Case 2: category-to-primary-key.
  if (c2->dtype == DataType::kPrimaryKey) {
    Database after = state;
    std::vector<std::string> warnings;
    const auto unmatched = recode_into_pk(after.table(table_1).column(column_1),
                                          state.table(table_2).column(column_2));
    if (unmatched) {
      warnings.push_back("partial match: " + std::to_string(unmatched) + " values of " + table_1 +
                         "." + column_1 + " have no key in " + table_2 +
                         "; they became null-links");
    }
    auto* def = after.schema.find_table(table_1)->find_column(column_1);
    def->dtype = DataType::kForeignKey;
    def->link_to = table_2 + "." + column_2;
    return finish(std::move(after),
                  "connected " + table_1 + "." + column_1 + " -> " + table_2 + "." + column_2,
                  std::move(warnings));
  }

  if (c2->dtype == DataType::kForeignKey) {
    return fail("incompatible-dtypes",
                "table-2 column is already a foreign key; put it in table 1 instead");
  }
  if (c2->dtype == DataType::kMultiCategory || c2->dtype == DataType::kEmbedding) {
    return fail("incompatible-dtypes",
                "cannot connect through a " + dtype_to_string(c2->dtype) + " column");
  }

  // Case 3: category to non-category non-key. When the target column
  // functionally determines its table's primary key (all rows distinct),
  // connect through that key; otherwise mint a surrogate dummy over the
  // target column's distinct values.
  const auto& c2_payload = state.table(table_2).column(column_2);
  const auto c2_distinct = distinct_in_order(c2_payload);
  const auto* t2_pk = t2->primary_key();
  if (t2_pk && c2_distinct.size() == state.table(table_2).row_count) {
    Database after = state;
    std::vector<std::string> warnings;
    std::unordered_map<std::string, Scalar> to_pk;
    const auto& pk_payload = state.table(table_2).column(t2_pk->name);
    for (std::size_t row = 0; row < c2_payload.cells.size(); ++row) {
      if (is_null(c2_payload.cells[row])) continue;
      to_pk.emplace(scalar_key(cell_to_scalar(c2_payload.cells[row])),
                    cell_to_scalar(pk_payload.cells[row]));
    }
    const auto unmatched =
        recode_through_mapping(after.table(table_1).column(column_1), to_pk);
    if (unmatched) {
      warnings.push_back("partial match: " + std::to_string(unmatched) + " values of " + table_1 +
                         "." + column_1 + " have no match in " + table_2 + "." + column_2 +
                         "; they became null-links");
    }
    auto* def = after.schema.find_table(table_1)->find_column(column_1);
    def->dtype = DataType::kForeignKey;
    def->link_to = table_2 + "." + t2_pk->name;
    return finish(std::move(after),
                  "connected " + table_1 + "." + column_1 + " -> " + table_2 + "." + t2_pk->name +
                      " (resolved through " + column_2 + ")",
                  std::move(warnings));
  }

  // Surrogate key path.
  std::string dummy_name = new_table_name.empty() ? column_2 : new_table_name;
  if (name_taken(state, dummy_name)) {
    return fail("name-collision", "surrogate table name '" + dummy_name + "' is taken");
  }
  std::string key_column = new_col_name.empty() ? dummy_name : new_col_name;
  if (!is_identifier(dummy_name) || !is_identifier(key_column)) {
    return fail("bad-identifier", "surrogate table and key names must be identifiers");
  }
  Database after = state;
  std::vector<std::string> warnings;
  KeySpace space{{}};
  for (const auto& value : c2_distinct) space.insert(value);

  auto& payload_2 = after.table(table_2).column(column_2);
  for (auto& cell : payload_2.cells) {
    if (is_null(cell)) continue;
    cell = *space.code_of(cell_to_scalar(cell));
  }
  std::size_t unmatched = 0;
  auto& payload_1 = after.table(table_1).column(column_1);
  for (auto& cell : payload_1.cells) {
    if (is_null(cell)) continue;
    const auto code = space.code_of(cell_to_scalar(cell));
    if (!code) {
      cell = Cell{};
      ++unmatched;
    } else {
      cell = *code;
    }
  }
  if (unmatched) {
    warnings.push_back("partial match: " + std::to_string(unmatched) + " values of " + table_1 +
                       "." + column_1 + " are outside the surrogate domain of " + table_2 + "." +
                       column_2 + "; they became null-links");
  }
  store_dummy(after, dummy_name, key_column, space);
  const std::pair<std::string, std::string> sides[] = {{table_1, column_1}, {table_2, column_2}};
  for (const auto& [side_table, side_column] : sides) {
    auto* def = after.schema.find_table(side_table)->find_column(side_column);
    def->dtype = DataType::kForeignKey;
    def->link_to = dummy_name + "." + key_column;
  }
  return finish(std::move(after),
                "connected " + table_1 + "." + column_1 + " and " + table_2 + "." + column_2 +
                    " through surrogate key '" + dummy_name + "' (" +
                    std::to_string(space.values().size()) + " keys)",
                std::move(warnings));
}

ApplyResult apply_explode_multi_category_column(const Database& state,
                                                const std::string& original_table,
                                                const std::string& multi_cat_col,
                                                const std::string& primary_key_column,
                                                const std::string& new_table_name,
                                                const std::string& new_col_name,
                                                const std::string& dtype) {
  const auto* table = state.schema.find_table(original_table);
  if (!table) return fail("unknown-table", "table '" + original_table + "' does not exist");
  const auto* column = table->find_column(multi_cat_col);
  if (!column) {
    return fail("unknown-column", "column '" + multi_cat_col + "' does not exist in table '" +
                                      original_table + "'");
  }
  if (column->dtype != DataType::kMultiCategory) {
    return fail("wrong-dtype",
                "multi_cat_col must have multi_category type, got " +
                    dtype_to_string(column->dtype));
  }
  const auto* pk = table->primary_key();
  if (!pk || pk->name != primary_key_column) {
    return fail("pk-mismatch", "'" + primary_key_column + "' is not the primary key of '" +
                                   original_table + "'");
  }
  if (dtype == "primary_key") {
    return fail("bad-dtype", "exploded column cannot be a primary key");
  }
  DataType new_dtype;
  try {
    new_dtype = dtype_from_string(dtype);
  } catch (const ParseError&) {
    return fail("unknown-dtype", "unknown dtype '" + dtype + "'");
  }
  if (!is_identifier(new_table_name) || !is_identifier(new_col_name)) {
    return fail("bad-identifier", "new table and column names must be identifiers");
  }
  if (name_taken(state, new_table_name)) {
    return fail("name-collision", "table name '" + new_table_name + "' is taken");
  }
  if (new_col_name == primary_key_column) {
    return fail("name-collision", "new_col_name collides with the back-reference column");
  }

  const auto& payload = state.table(original_table);
  const auto& lists = payload.column(multi_cat_col);
  const auto& pk_cells = payload.column(primary_key_column);

  std::vector<Scalar> back_refs;
  std::vector<Scalar> elements;
  for (std::size_t row = 0; row < lists.cells.size(); ++row) {
    const auto& cell = lists.cells[row];
    if (is_null(cell)) continue;
    for (const auto& item : std::get<std::vector<Scalar>>(cell)) {
      if (is_null(item)) continue;
      back_refs.push_back(cell_to_scalar(pk_cells.cells[row]));
      elements.push_back(item);
    }
  }

  Database after = state;
  TableDef new_table;
  new_table.name = new_table_name;
  new_table.source = "derived/" + new_table_name + ".csv";
  new_table.format = TableFormat::kCsv;

  TableData new_payload;
  new_payload.table_name = new_table_name;
  new_payload.row_count = elements.size();

  std::ostringstream log;
  if (new_dtype == DataType::kForeignKey) {
    // Edge-shaped: two foreign keys, no primary key. Elements live in a
    // dummy key space named after the new column.
    if (state.schema.has_table(new_col_name)) {
      return fail("name-collision", "dummy name '" + new_col_name + "' is a declared table");
    }
    std::string key_column = new_col_name;
    if (const auto* dummy = state.schema.find_dummy(new_col_name)) {
      key_column = dummy->key_column;
    }
    KeySpace space = key_space_of_dummy(after, new_col_name, key_column);
    Column back_column;
    Column element_column;
    for (std::size_t i = 0; i < elements.size(); ++i) {
      back_column.cells.push_back(scalar_to_cell(back_refs[i]));
      element_column.cells.push_back(space.insert(elements[i]));
    }
    store_dummy(after, new_col_name, key_column, space);

    new_table.columns.push_back(ColumnDef{primary_key_column, DataType::kForeignKey,
                                          original_table + "." + primary_key_column, {}});
    new_table.columns.push_back(
        ColumnDef{new_col_name, DataType::kForeignKey, new_col_name + "." + key_column, {}});
    new_payload.add_column(primary_key_column, std::move(back_column));
    new_payload.add_column(new_col_name, std::move(element_column));
    log << "exploded " << original_table << "." << multi_cat_col << " into edge table '"
        << new_table_name << "' (" << elements.size() << " rows, dummy '" << new_col_name
        << "' with " << space.values().size() << " keys)";
  } else {
    const std::string pk_name = new_table_name + "ID";
    if (pk_name == new_col_name || pk_name == primary_key_column) {
      return fail("name-collision", "generated key name '" + pk_name + "' collides");
    }
    Column id_column;
    Column value_column;
    Column back_column;
    for (std::size_t i = 0; i < elements.size(); ++i) {
      id_column.cells.push_back(static_cast<std::int64_t>(i));
      value_column.cells.push_back(scalar_to_cell(elements[i]));
      back_column.cells.push_back(scalar_to_cell(back_refs[i]));
    }
    new_table.columns.push_back(ColumnDef{pk_name, DataType::kPrimaryKey, {}, {}});
    new_table.columns.push_back(ColumnDef{new_col_name, new_dtype, {}, {}});
    new_table.columns.push_back(ColumnDef{primary_key_column, DataType::kForeignKey,
                                          original_table + "." + primary_key_column, {}});
    new_payload.add_column(pk_name, std::move(id_column));
    new_payload.add_column(new_col_name, std::move(value_column));
    new_payload.add_column(primary_key_column, std::move(back_column));
    log << "exploded " << original_table << "." << multi_cat_col << " into table '"
        << new_table_name << "' (" << elements.size() << " rows, value dtype " << dtype << ")";
  }

  after.schema.tables.push_back(std::move(new_table));
  after.tables[new_table_name] = std::move(new_payload);
  auto* base_def = after.schema.find_table(original_table);
  base_def->columns.erase(
      std::remove_if(base_def->columns.begin(), base_def->columns.end(),
                     [&](const ColumnDef& c) { return c.name == multi_cat_col; }),
      base_def->columns.end());
  after.table(original_table).drop_column(multi_cat_col);
  return finish(std::move(after), log.str());
}

ApplyResult apply_generate_non_dummy_table(const Database& state, const std::string& base_table,
                                           const std::vector<std::string>& cols,
                                           const std::string& new_table_name) {
  const auto* table = state.schema.find_table(base_table);
  if (!table) return fail("unknown-table", "table '" + base_table + "' does not exist");
  if (cols.empty()) return fail("empty-cols", "'cols' must name at least one column");
  for (const auto& name : cols) {
    const auto* column = table->find_column(name);
    if (!column) {
      return fail("unknown-column",
                  "column '" + name + "' does not exist in table '" + base_table + "'");
    }
    if (column->dtype == DataType::kPrimaryKey || column->dtype == DataType::kForeignKey) {
      return fail("key-column-in-cols", "column '" + name + "' is a key column; keys cannot move");
    }
    if (table->time_column && name == *table->time_column) {
      return fail("time-column-in-cols",
                  "column '" + name + "' is the table's time column and cannot move");
    }
  }
  if (!is_identifier(new_table_name)) {
    return fail("bad-identifier", "new_table_name must be an identifier");
  }
  if (name_taken(state, new_table_name)) {
    return fail("name-collision", "table name '" + new_table_name + "' is taken");
  }
  const std::string pk_name = new_table_name + "ID";
  bool fk_slot_free = !table->has_column(new_table_name);
  for (const auto& name : cols) {
    if (name == new_table_name) fk_slot_free = true;  // the move frees the name
  }
  if (!fk_slot_free) {
    return fail("name-collision", "base table already has a column named '" + new_table_name +
                                      "' that is not being moved");
  }

  const auto& payload = state.table(base_table);
  std::unordered_map<std::string, std::int64_t> tuple_codes;
  std::vector<std::vector<Cell>> tuples;  // distinct, first-occurrence order
  std::vector<std::int64_t> row_codes(payload.row_count);
  for (std::size_t row = 0; row < payload.row_count; ++row) {
    std::string key;
    std::vector<Cell> tuple;
    for (const auto& name : cols) {
      const auto& cell = payload.column(name).cells[row];
      tuple.push_back(cell);
      key += cell_key(cell);
      key.push_back('\x1f');
    }
    const auto it = tuple_codes.find(key);
    if (it == tuple_codes.end()) {
      const auto code = static_cast<std::int64_t>(tuples.size());
      tuple_codes.emplace(key, code);
      tuples.push_back(std::move(tuple));
      row_codes[row] = code;
    } else {
      row_codes[row] = it->second;
    }
  }

  Database after = state;
  TableDef new_table;
  new_table.name = new_table_name;
  new_table.source = "derived/" + new_table_name + ".csv";
  new_table.format = TableFormat::kCsv;
  new_table.columns.push_back(ColumnDef{pk_name, DataType::kPrimaryKey, {}, {}});

  TableData new_payload;
  new_payload.table_name = new_table_name;
  new_payload.row_count = tuples.size();
  Column id_column;
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    id_column.cells.push_back(static_cast<std::int64_t>(i));
  }
  new_payload.add_column(pk_name, std::move(id_column));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const auto* def = table->find_column(cols[c]);
    new_table.columns.push_back(ColumnDef{cols[c], def->dtype, {}, def->description});
    Column moved;
    for (const auto& tuple : tuples) moved.cells.push_back(tuple[c]);
    new_payload.add_column(cols[c], std::move(moved));
  }

  auto* base_def = after.schema.find_table(base_table);
  auto& base_payload = after.table(base_table);
  for (const auto& name : cols) {
    base_def->columns.erase(
        std::remove_if(base_def->columns.begin(), base_def->columns.end(),
                       [&](const ColumnDef& c) { return c.name == name; }),
        base_def->columns.end());
    base_payload.drop_column(name);
  }
  base_def->columns.push_back(
      ColumnDef{new_table_name, DataType::kForeignKey, new_table_name + "." + pk_name, {}});
  Column fk_column;
  for (const auto code : row_codes) fk_column.cells.push_back(code);
  base_payload.add_column(new_table_name, std::move(fk_column));

  after.schema.tables.push_back(std::move(new_table));
  after.tables[new_table_name] = std::move(new_payload);

  std::ostringstream log;
  log << "moved {" << join(cols, ", ") << "} from " << base_table << " into new table '"
      << new_table_name << "' (" << tuples.size() << " distinct rows)";
  return finish(std::move(after), log.str());
}

ApplyResult apply_remove_primary_key(const Database& state, const std::string& base_table,
                                     const std::string& col_name) {
  const auto* table = state.schema.find_table(base_table);
  if (!table) return fail("unknown-table", "table '" + base_table + "' does not exist");
  const auto* column = table->find_column(col_name);
  if (!column) {
    return fail("unknown-column",
                "column '" + col_name + "' does not exist in table '" + base_table + "'");
  }
  if (column->dtype != DataType::kPrimaryKey) {
    return fail("not-a-pk", "column '" + col_name + "' is not a primary key");
  }
  for (const auto& other : state.schema.tables) {
    for (const auto& fk : other.columns) {
      if (fk.dtype == DataType::kForeignKey && fk.link_table() == base_table &&
          fk.link_column() == col_name) {
        return fail("referenced-pk", "primary key '" + base_table + "." + col_name +
                                         "' is referenced by " + other.name + "." + fk.name);
      }
    }
  }
  if (table->columns.size() == 1) {
    return fail("last-column", "removing the only column would leave an empty table");
  }
  Database after = state;
  auto* def = after.schema.find_table(base_table);
  def->columns.erase(std::remove_if(def->columns.begin(), def->columns.end(),
                                    [&](const ColumnDef& c) { return c.name == col_name; }),
                     def->columns.end());
  after.table(base_table).drop_column(col_name);
  return finish(std::move(after),
                "removed primary key column " + base_table + "." + col_name);
}

ApplyResult apply_add_primary_key(const Database& state, const std::string& base_table,
                                  const std::string& col_name) {
  const auto* table = state.schema.find_table(base_table);
  if (!table) return fail("unknown-table", "table '" + base_table + "' does not exist");
  if (table->primary_key()) {
    return fail("pk-already-present",
                "table '" + base_table + "' already has a primary key");
  }
  if (table->has_column(col_name)) {
    return fail("name-collision", "column '" + col_name + "' already exists");
  }
  if (!is_identifier(col_name)) {
    return fail("bad-identifier", "col_name must be an identifier");
  }
  Database after = state;
  auto* def = after.schema.find_table(base_table);
  def->columns.insert(def->columns.begin(), ColumnDef{col_name, DataType::kPrimaryKey, {}, {}});
  auto& payload = after.table(base_table);
  Column id_column;
  for (std::size_t i = 0; i < payload.row_count; ++i) {
    id_column.cells.push_back(static_cast<std::int64_t>(i));
  }
  payload.order.insert(payload.order.begin(), col_name);
  payload.columns.insert(payload.columns.begin(), std::move(id_column));
  return finish(std::move(after), "added primary key column " + base_table + "." + col_name +
                                      " with dense integers 0.." +
                                      std::to_string(payload.row_count));
}

namespace {

std::optional<std::string> require_params(const Action& action,
                                          std::initializer_list<const char*> names) {
  for (const char* name : names) {
    if (!action.has_param(name)) return std::string(name);
  }
  return std::nullopt;
}

}  // namespace

ApplyResult apply_action(const Database& state, const Action& action) {
  if (action.kind == ActionKind::kNone) {
    ApplyResult result;
    result.after = state;
    result.terminal = true;
    result.log = "none: augmentation finished";
    return result;
  }

  ApplyResult result;
  switch (action.kind) {
    case ActionKind::kGenerateOrConnectDummyTable: {
      if (const auto missing = require_params(
              action, {"base_table_name", "orig_col_name", "new_table_name", "new_col_name"})) {
        return fail("missing-parameter", "missing parameter '" + *missing + "'");
      }
      result = apply_generate_or_connect_dummy_table(
          state, action.param("base_table_name"), action.param("orig_col_name"),
          action.param("new_table_name"), action.param("new_col_name"));
      break;
    }
    case ActionKind::kConnectTwoColumns: {
      if (const auto missing = require_params(action, {"table_1_name", "table_1_col_name",
                                                       "table_2_name", "table_2_col_name"})) {
        return fail("missing-parameter", "missing parameter '" + *missing + "'");
      }
      result = apply_connect_two_columns(
          state, action.param("table_1_name"), action.param("table_1_col_name"),
          action.param("table_2_name"), action.param("table_2_col_name"),
          action.param("new_table_name"), action.param("new_table_col_name"));
      break;
    }
    case ActionKind::kExplodeMultiCategoryColumn: {
      if (const auto missing =
              require_params(action, {"original_table", "multi_cat_col", "primary_key_column",
                                      "new_table_name", "new_col_name", "dtype"})) {
        return fail("missing-parameter", "missing parameter '" + *missing + "'");
      }
      result = apply_explode_multi_category_column(
          state, action.param("original_table"), action.param("multi_cat_col"),
          action.param("primary_key_column"), action.param("new_table_name"),
          action.param("new_col_name"), action.param("dtype"));
      break;
    }
    case ActionKind::kGenerateNonDummyTable: {
      if (const auto missing =
              require_params(action, {"base_table_name", "cols", "new_table_name"})) {
        return fail("missing-parameter", "missing parameter '" + *missing + "'");
      }
      const auto& cols_param = action.parameters.at("cols");
      std::vector<std::string> cols;
      if (cols_param.is_array()) {
        for (const auto& entry : cols_param) {
          if (entry.is_string()) cols.push_back(entry.get<std::string>());
        }
      } else if (cols_param.is_string()) {
        cols.push_back(cols_param.get<std::string>());
      }
      result = apply_generate_non_dummy_table(state, action.param("base_table_name"), cols,
                                              action.param("new_table_name"));
      break;
    }
    case ActionKind::kRemovePrimaryKey: {
      if (const auto missing = require_params(action, {"base_table_name", "col_name"})) {
        return fail("missing-parameter", "missing parameter '" + *missing + "'");
      }
      result = apply_remove_primary_key(state, action.param("base_table_name"),
                                        action.param("col_name"));
      break;
    }
    case ActionKind::kAddPrimaryKey: {
      if (const auto missing = require_params(action, {"base_table_name", "col_name"})) {
        return fail("missing-parameter", "missing parameter '" + *missing + "'");
      }
      result = apply_add_primary_key(state, action.param("base_table_name"),
                                     action.param("col_name"));
      break;
    }
    default:
      return fail("unknown-action", "unknown action kind");
  }

  if (result.ok()) {
    const auto violations = validate_schema(result.after.schema);
    if (!violations.empty()) {
      std::ostringstream message;
      message << "transformation produced an invalid schema:";
      for (const auto& violation : violations) {
        message << " [" << violation.rule << "] " << violation.message << ";";
      }
      return fail("post-validate", message.str());
    }
  }
  return result;
}

ScriptResult apply_script(const Database& state, const std::vector<Action>& actions) {
  ScriptResult result;
  result.after = state;
  for (std::size_t i = 0; i < actions.size(); ++i) {
    auto step = apply_action(result.after, actions[i]);
    if (!step.ok()) {
      result.error = step.error;
      result.error_step = i + 1;
      return result;
    }
    result.after = std::move(step.after);
    result.step_logs.push_back("step " + std::to_string(i + 1) + ": " + step.log);
    result.warnings.insert(result.warnings.end(), step.warnings.begin(), step.warnings.end());
    if (step.terminal) {
      result.terminal = true;
      return result;
    }
  }
  return result;
}

std::vector<Action> parse_action_script(const std::string& json_text) {
  nlohmann::json parsed;
  try {
    parsed = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("action script is not valid JSON: ") + e.what());
  }
  if (!parsed.is_array()) throw ParseError("action script must be a JSON array");
  std::vector<Action> actions;
  for (const auto& entry : parsed) actions.push_back(Action::from_json(entry));
  return actions;
}

std::string serialize_action_script(const std::vector<Action>& actions) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& action : actions) out.push_back(action.to_json());
  return out.dump(2) + "\n";
}

}  // namespace autog
