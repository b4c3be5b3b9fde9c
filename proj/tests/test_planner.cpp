#include "doctest.h"

#include <memory>

#include "autog/corpus.hpp"
#include "autog/planner.hpp"
#include "autog/util.hpp"
#include "test_support.hpp"

using namespace autog;
using autog::testing::TempDir;

TEST_CASE("tolerant parser: single quotes, bare keys, doubled braces, tuples") {
  const auto a = tolerant_json_parse("{'x': 'y'}");
  CHECK(a["x"] == "y");
  const auto b = tolerant_json_parse("{x: 1, 'y': None}");
  CHECK(b["x"] == 1);
  CHECK(b["y"].is_null());
  const auto c = tolerant_json_parse("[{{'a': 1}}, {'b': {'c': 2}},]");
  REQUIRE(c.is_array());
  CHECK(c.size() == 2);
  CHECK(c[0]["a"] == 1);
  CHECK(c[1]["b"]["c"] == 2);
  const auto d = tolerant_json_parse("{'t': ('float', 'desc')}");
  CHECK(d["t"].is_array());
  CHECK(d["t"][0] == "float");
  CHECK_THROWS_AS(tolerant_json_parse("completely not structured"), ParseError);
}

TEST_CASE("parse_selection extracts the CoT actions from the worked example") {
  // the completion slice of the example is exactly what a replayed model says
  const auto& example = corpus::cot_example();
  const auto selection = parse_selection(example);
  REQUIRE(selection.ok());
  REQUIRE_FALSE(selection.terminal);
  REQUIRE(selection.actions.size() == 4);
  CHECK(selection.actions[0].kind == ActionKind::kExplodeMultiCategoryColumn);
  CHECK(selection.actions[1].kind == ActionKind::kConnectTwoColumns);
  CHECK(selection.actions[2].kind == ActionKind::kGenerateNonDummyTable);
  CHECK(selection.actions[3].kind == ActionKind::kGenerateOrConnectDummyTable);
  CHECK(selection.actions[0].param("multi_cat_col") == "Author");
  CHECK(selection.actions[0].param("primary_key_column") == "PaperID");  // bare key repaired
  CHECK(selection.actions[2].parameters.at("cols").size() == 2);
}

TEST_CASE("parse_selection: None is terminal, last block wins, errors are values") {
  CHECK(parse_selection("<selection>None</selection>").terminal);
  CHECK(parse_selection("prefix <selection> None </selection> suffix").terminal);
  const auto last_wins = parse_selection(
      "<selection>[{'action': 'none', 'parameters': {}}]</selection> draft was wrong "
      "<selection>None</selection>");
  CHECK(last_wins.terminal);
  CHECK_FALSE(parse_selection("no block here").ok());
  CHECK_FALSE(parse_selection("<selection>[{'action': 'frobnicate'}]</selection>").ok());
  CHECK_FALSE(parse_selection("<selection>[{{{</selection>").ok());
  const auto unterminated = parse_selection("<selection>None");
  CHECK_FALSE(unterminated.ok());
}

TEST_CASE("assemble_prompt substitutes every slot into the fixed frame") {
  PromptBundle bundle;
  bundle.stats_report = "STATS-SENTINEL";
  bundle.task_description = "TASK-SENTINEL";
  bundle.schema_json = "SCHEMA-SENTINEL";
  bundle.similarity_report = "JTD-SENTINEL";
  bundle.history_actions = "HISTORY-SENTINEL";
  const auto messages = assemble_prompt(bundle);
  REQUIRE(messages.size() == 1);
  CHECK(messages[0].role == "user");
  const auto& text = messages[0].content;
  CHECK(text.find("Imagine you are an expert graph data scientist") == 0);
  CHECK(text.find("STATS-SENTINEL") != std::string::npos);
  CHECK(text.find("TASK-SENTINEL") != std::string::npos);
  CHECK(text.find("SCHEMA-SENTINEL") != std::string::npos);
  CHECK(text.find("JTD-SENTINEL") != std::string::npos);
  CHECK(text.find("History Actions:\nHISTORY-SENTINEL") != std::string::npos);
  CHECK(text.find("output your selection in the following format") != std::string::npos);
  CHECK(text.find("<selection>None</selection>") != std::string::npos);
  CHECK(text.find("<dataset_stats>\nSTATS-SENTINEL\n</dataset_stats>") != std::string::npos);
  CHECK(text.find("{actions}") == std::string::npos);
  CHECK(text.find("{jtd}") == std::string::npos);
  // default sections come from the corpus
  CHECK(text.find("Here is the introduction of the function connect_two_columns") !=
        std::string::npos);
}

TEST_CASE("reflect appends the draft and the fixed instruction") {
  ScriptedClient client({"revised"});
  std::vector<ChatMessage> messages{{"user", "prompt"}};
  const auto revised = reflect(client, messages, "draft");
  CHECK(revised == "revised");
  // fixed point: a client returning its draft unchanged
  ScriptedClient echo({"same", "same"});
  CHECK(echo.complete(messages) == reflect(echo, messages, "same"));
}

TEST_CASE("scripted client exhaustion raises a transport error") {
  ScriptedClient client({});
  CHECK_THROWS_AS(client.complete({{"user", "x"}}), IoError);
}

TEST_CASE("run_autog_s replays the CoT transcript to the expected schema") {
  TempDir dir("planner");
  const auto fixture = corpus::load_fixture("cot_paper_journal", dir.str());
  ScriptedClient client(transcript_completions(fixture.transcript_path));
  SessionOptions options;
  const auto session = run_autog_s(fixture.db, fixture.tasks[0], client, options);
  CHECK(session.terminal);
  CHECK(session.turns == 2);
  CHECK(session.applied.size() == 4);
  std::set<std::string> tables;
  for (const auto& table : session.db.schema.tables) tables.insert(table.name);
  CHECK(tables == std::set<std::string>{"Paper", "Journal", "Author", "Publisher"});
  std::set<std::string> dummies;
  for (const auto& dummy : session.db.schema.derived) dummies.insert(dummy.name);
  CHECK(dummies == std::set<std::string>{"Keyword", "AuthorName"});
  CHECK(validate_schema(session.db.schema).empty());
}

TEST_CASE("session replay is byte-deterministic") {
  TempDir dir("determinism");
  const auto fixture = corpus::load_fixture("cot_paper_journal", dir.str());
  SessionOptions options;
  ScriptedClient c1(transcript_completions(fixture.transcript_path));
  ScriptedClient c2(transcript_completions(fixture.transcript_path));
  const auto s1 = run_autog_s(fixture.db, fixture.tasks[0], c1, options);
  const auto s2 = run_autog_s(fixture.db, fixture.tasks[0], c2, options);
  CHECK(s1.transcript_jsonl() == s2.transcript_jsonl());
  CHECK(serialize_schema(s1.db.schema) == serialize_schema(s2.db.schema));
  CHECK(s1.logs == s2.logs);
}

TEST_CASE("an always-proposing client stops at the hard threshold") {
  TempDir dir("threshold");
  const auto fixture = corpus::load_fixture("cot_paper_journal", dir.str());
  // each completion proposes one fresh dummy-table action; reflection doubles
  // the response count
  std::vector<std::string> responses;
  for (int i = 0; i < 80; ++i) {
    // alternate over two category columns that never run out of freshness
    const std::string completion =
        "<selection>[{'explanation': 'more', 'action': 'generate_or_connect_dummy_table', "
        "'parameters': {'base_table_name': 'Paper', 'orig_col_name': 'Keyword', "
        "'new_table_name': 'Keyword', 'new_col_name': 'Keyword'}}]</selection>";
    responses.push_back(completion);
  }
  ScriptedClient client(responses);
  SessionOptions options;
  options.hard_threshold = 10;
  options.max_turns = 40;
  const auto session = run_autog_s(fixture.db, fixture.tasks[0], client, options);
  // the first application converts the column, later ones are no-op connects;
  // every one counts as an applied action, capped by the threshold
  CHECK(session.applied.size() == 10);
  CHECK_FALSE(session.terminal);
}

TEST_CASE("invalid actions are fed back and the session recovers") {
  TempDir dir("recover");
  const auto fixture = corpus::load_fixture("cot_paper_journal", dir.str());
  const std::string bad =
      "<selection>[{'explanation': 'oops', 'action': 'remove_primary_key', 'parameters': "
      "{'base_table_name': 'Paper', 'col_name': 'Keyword'}}]</selection>";
  const std::string good =
      "<selection>[{'explanation': 'fix', 'action': 'generate_or_connect_dummy_table', "
      "'parameters': {'base_table_name': 'Paper', 'orig_col_name': 'Keyword', "
      "'new_table_name': 'Keyword', 'new_col_name': 'Keyword'}}]</selection>";
  const std::string done = "<selection>None</selection>";
  ScriptedClient client({bad, bad, good, good, done, done});
  SessionOptions options;
  const auto session = run_autog_s(fixture.db, fixture.tasks[0], client, options);
  CHECK(session.terminal);
  CHECK(session.applied.size() == 1);
  bool fed_back = false;
  for (const auto& line : session.history) {
    if (line.find("Action 1 failed:") != std::string::npos) fed_back = true;
  }
  CHECK(fed_back);
}

TEST_CASE("parse failures are fed back as history notes") {
  TempDir dir("parsefail");
  const auto fixture = corpus::load_fixture("cot_paper_journal", dir.str());
  ScriptedClient client({"no block at all", "still nothing",
                         "<selection>None</selection>", "<selection>None</selection>"});
  SessionOptions options;
  const auto session = run_autog_s(fixture.db, fixture.tasks[0], client, options);
  CHECK(session.terminal);
  REQUIRE_FALSE(session.history.empty());
  CHECK(session.history[0].find("Selection parse failed") != std::string::npos);
}

TEST_CASE("transport failure preserves session state") {
  TempDir dir("transport");
  const auto fixture = corpus::load_fixture("cot_paper_journal", dir.str());
  ScriptedClient client({});  // exhausted immediately
  SessionOptions options;
  const auto session = run_autog_s(fixture.db, fixture.tasks[0], client, options);
  REQUIRE(session.session_error.has_value());
  CHECK(session.applied.empty());
  CHECK(serialize_schema(session.db.schema) == serialize_schema(fixture.db.schema));
}

TEST_CASE("run_autog_a with one run degenerates to AutoG-S plus a report") {
  TempDir dir("autoga1");
  const auto fixture = corpus::load_fixture("cot_paper_journal", dir.str());
  auto factory = [&](std::size_t) -> std::unique_ptr<ChatClient> {
    return std::make_unique<ScriptedClient>(transcript_completions(fixture.transcript_path));
  };
  SessionOptions options;
  const auto result =
      run_autog_a(fixture.db, fixture.tasks[0], factory, 1, default_basket(0.1), options);
  REQUIRE(result.reports.size() == 1);
  CHECK(result.best.applied.size() == 4);
  CHECK(result.reports[0].action_count == 4);
}

TEST_CASE("recording client writes a replayable transcript") {
  TempDir dir("record");
  ScriptedClient inner({"first completion", "second completion"});
  const auto path = (dir.path() / "t.jsonl").string();
  RecordingClient recorder(&inner, path);
  CHECK(recorder.complete({{"user", "prompt one"}}) == "first completion");
  CHECK(recorder.complete({{"user", "prompt one"}, {"assistant", "first completion"},
                           {"user", "prompt two"}}) == "second completion");
  const auto completions = transcript_completions(path);
  REQUIRE(completions.size() == 2);
  CHECK(completions[0] == "first completion");
  CHECK(completions[1] == "second completion");
}

TEST_CASE("infer_types_llm parses tuple replies and falls back per column") {
  const std::string reply =
      "{\n"
      "    \"paper\": {\n"
      "        \"year\": (\"category\", \"Only years, better treated as category.\"),\n"
      "        \"weird\": (\"wobble\", \"unknown type\")\n"
      "    }\n"
      "}";
  ScriptedClient client({reply});
  std::map<std::string, std::map<std::string, TypeGuess>> fallback;
  fallback["paper"]["year"] = {DataType::kTimestamp, 0.5, "fallback"};
  fallback["paper"]["weird"] = {DataType::kNumeric, 0.5, "fallback"};
  const auto result = infer_types_llm(client, "stats", fallback);
  CHECK_FALSE(result.fallback_used);
  CHECK(result.guesses.at("paper").at("year").dtype == DataType::kCategory);
  CHECK(result.guesses.at("paper").at("year").description ==
        "Only years, better treated as category.");
  // unknown dtype keeps the deterministic answer and records a note
  CHECK(result.guesses.at("paper").at("weird").dtype == DataType::kNumeric);
  REQUIRE_FALSE(result.notes.empty());
}

TEST_CASE("infer_types_llm falls back entirely on garbage and on transport failure") {
  std::map<std::string, std::map<std::string, TypeGuess>> fallback;
  fallback["t"]["c"] = {DataType::kCategory, 0.6, "det"};
  ScriptedClient garbage({"not parseable at all ]]["});
  const auto from_garbage = infer_types_llm(garbage, "stats", fallback);
  CHECK(from_garbage.fallback_used);
  CHECK(from_garbage.guesses.at("t").at("c").dtype == DataType::kCategory);
  ScriptedClient dead({});
  const auto from_dead = infer_types_llm(dead, "stats", fallback);
  CHECK(from_dead.fallback_used);
}

TEST_CASE("fuzzed malformed selections never escape as valid actions") {
  std::mt19937_64 rng(99);
  const std::string valid =
      "<selection>[{'explanation': 'x', 'action': 'add_primary_key', 'parameters': "
      "{'base_table_name': 'T', 'col_name': 'id'}}]</selection>";
  std::size_t mutated_ok = 0;
  for (int i = 0; i < 300; ++i) {
    auto broken = valid;
    const auto op = bounded_uint(rng, 4);
    const auto at = bounded_uint(rng, broken.size());
    if (op == 0) broken.erase(at, 1 + bounded_uint(rng, 5));
    else if (op == 1) broken.insert(at, "}{'");
    else if (op == 2) broken[at] = static_cast<char>(bounded_uint(rng, 256));
    else broken = broken.substr(0, at);
    const auto selection = parse_selection(broken);
    if (!selection.ok()) continue;
    // a mutation may still be parseable; every surviving action must be a
    // known kind with well-formed parameters
    ++mutated_ok;
    for (const auto& action : selection.actions) {
      CHECK(action_kind_to_string(action.kind) != "");
    }
  }
  CHECK(mutated_ok < 300);  // the fuzzer does break most payloads
}
