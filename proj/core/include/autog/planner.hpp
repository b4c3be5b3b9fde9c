#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "autog/actions.hpp"
#include "autog/graph.hpp"
#include "autog/oracle.hpp"
#include "autog/profile.hpp"

#include "json.hpp"

namespace autog {

struct ChatMessage {
  std::string role;  // "user" | "assistant" | "system"
  std::string content;
};

/// Chat model port: ordered messages in, completion text out. Implementations
/// must be safe for concurrent independent sessions.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual std::string complete(const std::vector<ChatMessage>& messages) = 0;
};

/// Canned responses in order; used for replay and tests. Throws IoError when
/// the script runs out.
class ScriptedClient : public ChatClient {
 public:
  explicit ScriptedClient(std::vector<std::string> responses)
      : responses_(std::move(responses)) {}
  std::string complete(const std::vector<ChatMessage>& messages) override;
  std::size_t consumed() const { return next_; }

 private:
  std::vector<std::string> responses_;
  std::size_t next_ = 0;
};

/// Wraps a client and appends every exchanged message to a JSONL transcript
/// ({"turn","role","content"} per line), so live sessions replay offline.
class RecordingClient : public ChatClient {
 public:
  RecordingClient(ChatClient* inner, std::string transcript_path);
  std::string complete(const std::vector<ChatMessage>& messages) override;

 private:
  ChatClient* inner_;
  std::string path_;
  std::size_t recorded_ = 0;
  std::size_t turn_ = 0;
};

/// Live client over the NDJSON subprocess protocol: one request
/// {"messages":[{role,content}...],"seed","temperature"} per completion, one
/// {"content": "..."} response line. Retries transport failures.
class SubprocessChatClient : public ChatClient {
 public:
  struct Options {
    std::vector<std::string> command;
    std::uint64_t seed = 0;
    double temperature = 0.0;
    int retries = 1;
  };
  explicit SubprocessChatClient(Options options) : options_(std::move(options)) {}
  std::string complete(const std::vector<ChatMessage>& messages) override;

 private:
  Options options_;
};

/// Assistant turns of a recorded transcript, in order (replay input).
std::vector<std::string> transcript_completions(const std::string& transcript_path);

/// Lenient reader for model-emitted payloads: single-quoted strings, bare
/// keys, doubled braces, Python tuples and trailing commas all normalize to
/// JSON. Throws ParseError when no sensible repair exists.
nlohmann::json tolerant_json_parse(const std::string& text);

struct Selection {
  bool terminal = false;
  std::vector<Action> actions;
  std::optional<std::string> error;  // structured parse error for feedback

  bool ok() const { return !error.has_value(); }
};

/// Extracts the last <selection>...</selection> block. "None" is terminal.
Selection parse_selection(const std::string& completion);

struct PromptBundle {
  std::string stats_report;
  std::string task_description;
  std::string schema_json;
  std::string similarity_report;
  std::string action_docs;   // defaults to corpus::action_docs()
  std::string cot_example;   // defaults to corpus::cot_example()
  std::string history_actions;
  std::size_t hard_threshold = 10;
};

/// Renders the augmentation template with the bundle's sections; the frame
/// around the slots is byte-fixed.
std::vector<ChatMessage> assemble_prompt(const PromptBundle& bundle);

/// One self-reflection pass: draft goes back as an assistant turn followed by
/// the fixed reflection instruction.
std::string reflect(ChatClient& client, const std::vector<ChatMessage>& messages,
                    const std::string& draft_completion);

struct SessionOptions {
  std::size_t hard_threshold = 10;
  bool reflection = true;
  // Bounds prompting turns so a never-terminating, never-valid client cannot
  // spin forever; unreachable for conforming clients.
  std::size_t max_turns = 25;
  std::size_t profile_k = 5;
  std::uint64_t profile_seed = 0;
  std::size_t similarity_top_n = 20;
};

struct SessionState {
  Database db;
  std::vector<Action> applied;
  std::vector<std::string> history;  // rendered lines, errors included
  std::size_t turns = 0;
  bool terminal = false;
  bool turn_limit_hit = false;
  std::optional<std::string> session_error;  // client transport failure
  std::vector<nlohmann::ordered_json> transcript;  // {turn, role, content}
  std::vector<std::string> logs;

  std::string transcript_jsonl() const;
};

/// The AutoG-S loop: assemble, complete, reflect, parse, apply with error
/// feedback; stops on `none` or at the hard threshold.
SessionState run_autog_s(const Database& initial, const Task& task, ChatClient& client,
                         const SessionOptions& options);

struct AutoGAResult {
  SessionState best;
  std::size_t best_run = 0;
  BuildMode best_mode = BuildMode::kRow2NodeEdge;
  std::vector<OracleReport> reports;  // one per run (the better of both modes)
};

/// AutoG-A: R independent sessions; every terminal schema is built in both
/// modes, scored, and the best aggregate wins (ties: fewer actions, then id).
AutoGAResult run_autog_a(const Database& initial, const Task& task,
                         const std::function<std::unique_ptr<ChatClient>(std::size_t)>& clients,
                         std::size_t runs, const std::vector<ScorerConfig>& basket,
                         const SessionOptions& options);

struct LlmTypeInference {
  std::map<std::string, std::map<std::string, TypeGuess>> guesses;
  bool fallback_used = false;
  std::vector<std::string> notes;
};

/// Sends the type-inference prompt and parses the mapping-of-tuples reply;
/// falls back to the deterministic inference per column on parse trouble and
/// entirely on transport failure.
LlmTypeInference infer_types_llm(ChatClient& client, const std::string& stats_report,
                                 const std::map<std::string, std::map<std::string, TypeGuess>>&
                                     deterministic_fallback);

}  // namespace autog
