#include "autog/planner.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "autog/corpus.hpp"
#include "autog/join_discovery.hpp"
#include "autog/profile.hpp"
#include "autog/subprocess.hpp"
#include "autog/util.hpp"

namespace autog {

std::string ScriptedClient::complete(const std::vector<ChatMessage>& messages) {
  (void)messages;
  if (next_ >= responses_.size()) {
    throw IoError("scripted client exhausted after " + std::to_string(next_) + " completions");
  }
  return responses_[next_++];
}

RecordingClient::RecordingClient(ChatClient* inner, std::string transcript_path)
    : inner_(inner), path_(std::move(transcript_path)) {}

std::string RecordingClient::complete(const std::vector<ChatMessage>& messages) {
  const auto completion = inner_->complete(messages);
  std::ofstream out(path_, std::ios::app);
  if (!out) throw IoError("cannot append to transcript '" + path_ + "'");
  for (std::size_t i = recorded_; i < messages.size(); ++i) {
    nlohmann::ordered_json line{{"turn", turn_}, {"role", messages[i].role},
                                {"content", messages[i].content}};
    out << line.dump() << "\n";
  }
  recorded_ = messages.size();
  nlohmann::ordered_json line{{"turn", turn_}, {"role", "assistant"}, {"content", completion}};
  out << line.dump() << "\n";
  ++recorded_;  // the assistant turn will appear in the next request
  ++turn_;
  return completion;
}

std::string SubprocessChatClient::complete(const std::vector<ChatMessage>& messages) {
  nlohmann::ordered_json request;
  auto rendered = nlohmann::ordered_json::array();
  for (const auto& message : messages) {
    rendered.push_back({{"role", message.role}, {"content", message.content}});
  }
  request["messages"] = rendered;
  request["seed"] = options_.seed;
  request["temperature"] = options_.temperature;
  const auto payload = request.dump();

  std::string last_error;
  for (int attempt = 0; attempt <= options_.retries; ++attempt) {
    try {
      Subprocess process(options_.command);
      process.write_line(payload);
      std::string line;
      if (!process.read_line(&line)) throw IoError("chat subprocess closed without a response");
      const auto response = nlohmann::json::parse(line);
      if (response.contains("error")) {
        throw IoError("chat subprocess error: " + response["error"].get<std::string>());
      }
      return response.at("content").get<std::string>();
    } catch (const std::exception& e) {
      last_error = e.what();
    }
  }
  throw IoError("chat transport failed after " + std::to_string(options_.retries + 1) +
                " attempts: " + last_error);
}

std::vector<std::string> transcript_completions(const std::string& transcript_path) {
  std::ifstream in(transcript_path);
  if (!in) throw IoError("cannot open transcript '" + transcript_path + "'");
  std::vector<std::string> completions;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto parsed = nlohmann::json::parse(line);
    if (parsed.value("role", "") == "assistant") {
      completions.push_back(parsed.value("content", ""));
    }
  }
  return completions;
}

// ---- tolerant reader ----

namespace {

struct Token {
  enum class Kind { kPunct, kString, kNumber, kWord, kEnd };
  Kind kind = Kind::kEnd;
  char punct = 0;
  std::string text;
  double number = 0.0;
  bool integral = false;
  std::int64_t integer = 0;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> tokens;
    while (true) {
      skip_space();
      if (pos_ >= text_.size()) break;
      const char c = text_[pos_];
      if (c == '{' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '{') {
        // Doubled open brace from format-template style output.
        tokens.push_back(punct('{'));
        pos_ += 2;
      } else if (c == '{' || c == '}' || c == '[' || c == ']' || c == '(' || c == ')' ||
                 c == ':' || c == ',') {
        tokens.push_back(punct(c));
        ++pos_;
      } else if (c == '\'' || c == '"') {
        tokens.push_back(string_token(c));
      } else if (c == '-' || c == '+' || std::isdigit(static_cast<unsigned char>(c))) {
        tokens.push_back(number_token());
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        tokens.push_back(word_token());
      } else {
        throw ParseError("unexpected character '" + std::string(1, c) + "' in payload");
      }
    }
    tokens.push_back(Token{});
    return tokens;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  static Token punct(char c) {
    Token token;
    token.kind = Token::Kind::kPunct;
    token.punct = c;
    return token;
  }
  Token string_token(char quote) {
    Token token;
    token.kind = Token::Kind::kString;
    ++pos_;
    while (pos_ < text_.size() && text_[pos_] != quote) {
      char c = text_[pos_];
      if (c == '\\' && pos_ + 1 < text_.size()) {
        const char escaped = text_[pos_ + 1];
        switch (escaped) {
          case 'n': token.text.push_back('\n'); break;
          case 't': token.text.push_back('\t'); break;
          case 'r': token.text.push_back('\r'); break;
          default: token.text.push_back(escaped); break;
        }
        pos_ += 2;
        continue;
      }
      token.text.push_back(c);
      ++pos_;
    }
    if (pos_ >= text_.size()) throw ParseError("unterminated string in payload");
    ++pos_;
    return token;
  }
  Token number_token() {
    const std::size_t start = pos_;
    if (text_[pos_] == '-' || text_[pos_] == '+') ++pos_;
    bool real = false;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '.' || c == 'e' || c == 'E') {
        real = true;
        ++pos_;
        if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
      } else {
        break;
      }
    }
    Token token;
    token.kind = Token::Kind::kNumber;
    const auto slice = text_.substr(start, pos_ - start);
    try {
      if (real) {
        token.number = std::stod(slice);
      } else {
        token.integral = true;
        token.integer = std::stoll(slice);
      }
    } catch (const std::exception&) {
      throw ParseError("number '" + slice + "' is out of range");
    }
    return token;
  }
  Token word_token() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    Token token;
    token.kind = Token::Kind::kWord;
    token.text = text_.substr(start, pos_ - start);
    return token;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

class TolerantParser {
 public:
  explicit TolerantParser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  nlohmann::json run() {
    const auto value = parse_value();
    // Trailing stray closers are over-closing repairs; anything else is junk.
    while (is_punct('}') || is_punct(',')) ++pos_;
    if (tokens_[pos_].kind != Token::Kind::kEnd) {
      throw ParseError("trailing content after payload");
    }
    return value;
  }

 private:
  bool is_punct(char c) const {
    return tokens_[pos_].kind == Token::Kind::kPunct && tokens_[pos_].punct == c;
  }
  void expect(char c) {
    if (!is_punct(c)) throw ParseError(std::string("expected '") + c + "' in payload");
    ++pos_;
  }

  nlohmann::json parse_value() {
    const auto& token = tokens_[pos_];
    switch (token.kind) {
      case Token::Kind::kPunct:
        if (token.punct == '{') {
          ++pos_;
          return parse_object();
        }
        if (token.punct == '[') {
          ++pos_;
          return parse_array(']');
        }
        if (token.punct == '(') {
          ++pos_;
          return parse_array(')');  // Python tuples read as arrays
        }
        throw ParseError(std::string("unexpected '") + token.punct + "' in payload");
      case Token::Kind::kString: {
        ++pos_;
        return tokens_[pos_ - 1].text;
      }
      case Token::Kind::kNumber: {
        ++pos_;
        const auto& number = tokens_[pos_ - 1];
        if (number.integral) return number.integer;
        return number.number;
      }
      case Token::Kind::kWord: {
        ++pos_;
        const auto& word = tokens_[pos_ - 1].text;
        if (word == "true" || word == "True") return true;
        if (word == "false" || word == "False") return false;
        if (word == "null" || word == "None") return nullptr;
        return word;  // bare word as string
      }
      case Token::Kind::kEnd:
        throw ParseError("payload ended unexpectedly");
    }
    throw ParseError("unreachable token state");
  }

  nlohmann::json parse_object() {
    nlohmann::json object = nlohmann::json::object();
    while (true) {
      if (is_punct('}')) {
        ++pos_;
        return object;
      }
      if (is_punct(']')) {
        // Under-closed object: close it implicitly, the array owns ']'.
        return object;
      }
      std::string key;
      if (tokens_[pos_].kind == Token::Kind::kString ||
          tokens_[pos_].kind == Token::Kind::kWord) {
        key = tokens_[pos_].text;  // bare identifiers become quoted keys
        ++pos_;
      } else {
        throw ParseError("expected an object key");
      }
      expect(':');
      object[key] = parse_value();
      if (is_punct(',')) {
        ++pos_;
        continue;
      }
      if (is_punct('}')) {
        ++pos_;
        return object;
      }
      if (is_punct(']') || tokens_[pos_].kind == Token::Kind::kEnd) {
        return object;  // under-closed
      }
      throw ParseError("expected ',' or '}' after object member");
    }
  }

  nlohmann::json parse_array(char closer) {
    nlohmann::json array = nlohmann::json::array();
    while (true) {
      while (is_punct('}')) ++pos_;  // over-closing repair between elements
      if (is_punct(closer)) {
        ++pos_;
        return array;
      }
      if (tokens_[pos_].kind == Token::Kind::kEnd) {
        throw ParseError("unterminated array in payload");
      }
      array.push_back(parse_value());
      while (is_punct('}')) ++pos_;
      if (is_punct(',')) {
        ++pos_;
        continue;
      }
      if (is_punct(closer)) {
        ++pos_;
        return array;
      }
      if (tokens_[pos_].kind == Token::Kind::kEnd) {
        throw ParseError("unterminated array in payload");
      }
      throw ParseError("expected ',' or closing bracket in array");
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

nlohmann::json tolerant_json_parse(const std::string& text) {
  // Fast path first: most clients emit valid JSON.
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception&) {
  }
  Lexer lexer(text);
  TolerantParser parser(lexer.run());
  return parser.run();
}

Selection parse_selection(const std::string& completion) {
  Selection selection;
  const std::string open_tag = "<selection>";
  const std::string close_tag = "</selection>";
  const auto open = completion.rfind(open_tag);
  if (open == std::string::npos) {
    selection.error = "no <selection> block in completion";
    return selection;
  }
  const auto close = completion.find(close_tag, open);
  if (close == std::string::npos) {
    selection.error = "unterminated <selection> block";
    return selection;
  }
  const auto inner = trim(completion.substr(open + open_tag.size(), close - open - open_tag.size()));
  if (inner == "None" || inner == "none") {
    selection.terminal = true;
    return selection;
  }
  nlohmann::json parsed;
  try {
    parsed = tolerant_json_parse(inner);
  } catch (const std::exception& e) {
    selection.error = std::string("selection payload is unparseable: ") + e.what();
    return selection;
  }
  if (parsed.is_object()) {
    nlohmann::json wrapped = nlohmann::json::array();
    wrapped.push_back(parsed);
    parsed = wrapped;
  }
  if (!parsed.is_array()) {
    selection.error = "selection payload must be a JSON array of actions";
    return selection;
  }
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    try {
      selection.actions.push_back(Action::from_json(parsed[i]));
    } catch (const std::exception& e) {
      selection.error =
          "action " + std::to_string(i + 1) + " is invalid: " + e.what();
      selection.actions.clear();
      return selection;
    }
  }
  return selection;
}

namespace {

void replace_slot(std::string& text, const std::string& slot, const std::string& value) {
  const auto at = text.find(slot);
  if (at == std::string::npos) {
    throw ParseError("prompt template is missing slot " + slot);
  }
  text.replace(at, slot.size(), value);
}

std::string schema_as_json(const DatasetSchema& schema) {
  nlohmann::ordered_json out;
  out["dataset_name"] = schema.dataset_name;
  auto tables = nlohmann::ordered_json::array();
  for (const auto& table : schema.tables) {
    nlohmann::ordered_json entry;
    entry["name"] = table.name;
    entry["source"] = table.source;
    entry["format"] = format_to_string(table.format);
    auto columns = nlohmann::ordered_json::array();
    for (const auto& column : table.columns) {
      nlohmann::ordered_json c;
      c["name"] = column.name;
      c["dtype"] = dtype_to_string(column.dtype);
      if (column.link_to) c["link_to"] = *column.link_to;
      columns.push_back(c);
    }
    entry["columns"] = columns;
    if (table.time_column) entry["time_column"] = *table.time_column;
    tables.push_back(entry);
  }
  out["tables"] = tables;
  return out.dump(4);
}

}  // namespace

std::vector<ChatMessage> assemble_prompt(const PromptBundle& bundle) {
  std::string text = corpus::augmentation_template();
  replace_slot(text, "{actions}",
               bundle.action_docs.empty() ? corpus::action_docs() : bundle.action_docs);
  replace_slot(text, "{example}",
               bundle.cot_example.empty() ? corpus::cot_example() : bundle.cot_example);
  replace_slot(text, "{history_actions}", bundle.history_actions);
  replace_slot(text, "{stats}", bundle.stats_report);
  replace_slot(text, "{task}", bundle.task_description);
  replace_slot(text, "{input_schema}", bundle.schema_json);
  replace_slot(text, "{jtd}", bundle.similarity_report);
  return {ChatMessage{"user", text}};
}

std::string reflect(ChatClient& client, const std::vector<ChatMessage>& messages,
                    const std::string& draft_completion) {
  auto extended = messages;
  extended.push_back(ChatMessage{"assistant", draft_completion});
  extended.push_back(ChatMessage{"user", corpus::reflection_instruction()});
  return client.complete(extended);
}

std::string SessionState::transcript_jsonl() const {
  std::ostringstream out;
  for (const auto& line : transcript) out << line.dump() << "\n";
  return out.str();
}

SessionState run_autog_s(const Database& initial, const Task& task, ChatClient& client,
                         const SessionOptions& options) {
  SessionState state;
  state.db = initial;

  while (!state.terminal && state.applied.size() < options.hard_threshold &&
         state.turns < options.max_turns) {
    // Context reflects the current state: stats and similarity re-derive
    // after every applied action.
    const auto profiles =
        profile_dataset(state.db.schema, state.db.tables, options.profile_k, options.profile_seed);
    const auto similarity = rank_pairs(state.db.schema, profiles, &state.db.tables,
                                       SimilarityMethod::kEmbedding, options.similarity_top_n);

    PromptBundle bundle;
    bundle.stats_report = render_stats_report(state.db.schema, profiles);
    bundle.task_description = task.description.empty() ? task.name : task.description;
    bundle.schema_json = schema_as_json(state.db.schema);
    bundle.similarity_report = similarity.report;
    bundle.history_actions = join(state.history, "\n");
    bundle.hard_threshold = options.hard_threshold;
    const auto messages = assemble_prompt(bundle);

    std::string completion;
    try {
      state.transcript.push_back(
          {{"turn", state.turns}, {"role", "user"}, {"content", messages.front().content}});
      const auto draft = client.complete(messages);
      state.transcript.push_back({{"turn", state.turns}, {"role", "assistant"}, {"content", draft}});
      if (options.reflection) {
        state.transcript.push_back({{"turn", state.turns},
                                    {"role", "user"},
                                    {"content", corpus::reflection_instruction()}});
        completion = reflect(client, messages, draft);
        state.transcript.push_back(
            {{"turn", state.turns}, {"role", "assistant"}, {"content", completion}});
      } else {
        completion = draft;
      }
    } catch (const IoError& e) {
      state.logs.push_back(std::string("session aborted on client failure: ") + e.what());
      state.session_error = e.what();
      return state;
    }
    ++state.turns;

    const auto selection = parse_selection(completion);
    if (!selection.ok()) {
      state.history.push_back("Selection parse failed: " + *selection.error);
      state.logs.push_back("turn " + std::to_string(state.turns) +
                           ": parse error fed back to the planner");
      continue;
    }
    if (selection.terminal) {
      state.terminal = true;
      state.logs.push_back("turn " + std::to_string(state.turns) + ": planner selected None");
      break;
    }
    for (std::size_t k = 0; k < selection.actions.size(); ++k) {
      if (state.applied.size() >= options.hard_threshold) {
        state.logs.push_back("hard threshold of " + std::to_string(options.hard_threshold) +
                             " applied actions reached");
        break;
      }
      const auto& action = selection.actions[k];
      auto result = apply_action(state.db, action);
      if (result.terminal) {
        state.terminal = true;
        state.logs.push_back("planner emitted none inside a selection; session ends");
        break;
      }
      if (!result.ok()) {
        state.history.push_back("Action " + std::to_string(k + 1) +
                                " failed: " + result.error->message);
        state.logs.push_back("action rejected (" + result.error->code + "): " +
                             result.error->message);
        continue;
      }
      state.db = std::move(result.after);
      state.applied.push_back(action);
      state.history.push_back(action.to_json().dump());
      state.logs.push_back(result.log);
      for (const auto& warning : result.warnings) state.logs.push_back("warning: " + warning);
    }
  }
  if (!state.terminal && state.applied.size() < options.hard_threshold &&
      state.turns >= options.max_turns) {
    state.turn_limit_hit = true;
    state.logs.push_back("turn limit reached without termination");
  }
  return state;
}

AutoGAResult run_autog_a(const Database& initial, const Task& task,
                         const std::function<std::unique_ptr<ChatClient>(std::size_t)>& clients,
                         std::size_t runs, const std::vector<ScorerConfig>& basket,
                         const SessionOptions& options) {
  if (runs == 0) throw ParseError("run_autog_a needs at least one run");
  AutoGAResult result;
  std::vector<SessionState> sessions;
  std::vector<BuildMode> modes;
  std::vector<std::string> failures;

  char run_id[16];
  for (std::size_t run = 0; run < runs; ++run) {
    std::snprintf(run_id, sizeof(run_id), "run%02zu", run);
    auto client = clients(run);
    auto session_options = options;
    session_options.profile_seed = options.profile_seed + run;  // candidate diversity
    auto session = run_autog_s(initial, task, *client, session_options);
    if (session.session_error) {
      failures.push_back(std::string(run_id) + ": " + *session.session_error);
      continue;
    }
    // Score the terminal schema under both construction modes, keep the
    // better one for this candidate.
    std::optional<OracleReport> best_report;
    BuildMode best_mode = BuildMode::kRow2NodeEdge;
    for (const auto mode : {BuildMode::kRow2Node, BuildMode::kRow2NodeEdge}) {
      try {
        const auto graph = build_graph(session.db, mode);
        auto report = score_candidate(graph, task, basket,
                                      std::string(run_id) + ":" + build_mode_to_string(mode));
        if (!best_report || report.aggregate > best_report->aggregate) {
          best_report = std::move(report);
          best_mode = mode;
        }
      } catch (const std::exception& e) {
        failures.push_back(std::string(run_id) + " (" + build_mode_to_string(mode) +
                           "): " + e.what());
      }
    }
    if (!best_report) continue;
    best_report->candidate_id = run_id;
    best_report->action_count = session.applied.size();
    result.reports.push_back(std::move(*best_report));
    sessions.push_back(std::move(session));
    modes.push_back(best_mode);
  }
  if (result.reports.empty()) {
    throw IoError("all AutoG-A runs failed: " + join(failures, " | "));
  }
  const auto ranking = rank_candidates(result.reports);
  for (std::size_t i = 0; i < result.reports.size(); ++i) {
    if (result.reports[i].candidate_id == ranking.front()) {
      result.best = sessions[i];
      result.best_mode = modes[i];
      result.best_run = static_cast<std::size_t>(std::stoul(ranking.front().substr(3)));
      break;
    }
  }
  return result;
}

LlmTypeInference infer_types_llm(ChatClient& client, const std::string& stats_report,
                                 const std::map<std::string, std::map<std::string, TypeGuess>>&
                                     deterministic_fallback) {
  LlmTypeInference result;
  std::string completion;
  try {
    completion = client.complete(
        {ChatMessage{"user", corpus::type_inference_prompt() + "\n" + stats_report}});
  } catch (const std::exception& e) {
    result.guesses = deterministic_fallback;
    result.fallback_used = true;
    result.notes.push_back(std::string("transport failure, deterministic inference used: ") +
                           e.what());
    return result;
  }

  nlohmann::json parsed;
  try {
    parsed = tolerant_json_parse(completion);
    if (!parsed.is_object()) throw ParseError("type inference reply is not a mapping");
  } catch (const ParseError& e) {
    result.guesses = deterministic_fallback;
    result.fallback_used = true;
    result.notes.push_back(std::string("unparseable reply, deterministic inference used: ") +
                           e.what());
    return result;
  }

  result.guesses = deterministic_fallback;
  for (const auto& [table, columns] : parsed.items()) {
    if (!columns.is_object()) continue;
    for (const auto& [column, tuple] : columns.items()) {
      std::string dtype_text;
      std::string description;
      if (tuple.is_array() && !tuple.empty() && tuple[0].is_string()) {
        dtype_text = tuple[0].get<std::string>();
        if (tuple.size() > 1 && tuple[1].is_string()) description = tuple[1].get<std::string>();
      } else if (tuple.is_string()) {
        dtype_text = tuple.get<std::string>();
      } else {
        result.notes.push_back("column " + table + "." + column +
                               ": malformed entry, deterministic inference kept");
        continue;
      }
      if (dtype_text == "categorical") dtype_text = "category";
      DataType dtype;
      try {
        dtype = dtype_from_string(dtype_text);
      } catch (const ParseError&) {
        result.notes.push_back("column " + table + "." + column + ": unknown dtype '" +
                               dtype_text + "', deterministic inference kept");
        continue;
      }
      TypeGuess guess;
      guess.dtype = dtype;
      guess.confidence = 0.9;
      guess.description = description;  // preserved verbatim for the planner context
      result.guesses[table][column] = guess;
    }
  }
  return result;
}

}  // namespace autog
