#include <doctest.h>

#include <sstream>

#include "lexeval/codec.hpp"
#include "lexeval/dsl.hpp"
#include "lexeval/engine.hpp"
#include "lexeval/harness.hpp"
#include "support/fixtures.hpp"

using namespace lexeval;

namespace {

Instruction make(std::string id, Language lang, std::initializer_list<const char*> sources) {
  Instruction instr;
  instr.id = std::move(id);
  instr.language = lang;
  for (const char* s : sources) instr.rules.push_back(dsl::parse_rule(s));
  instr.difficulty = grade_difficulty(instr.rules).grade;
  instr.depth = instruction_depth(instr.rules);
  instr.count = static_cast<int>(instr.rules.size());
  instr.prompt = render_prompt(instr.rules, lang, "Task");
  return instr;
}

std::vector<Instruction> four() {
  return {make("a", Language::kEn, {R"(sentence@1 startswith "A")"}),
          make("b", Language::kEn, {R"(sentence@1 startswith "A")"}),
          make("c", Language::kEn, {R"(sentence@1 startswith "A")"}),
          make("d", Language::kEn, {R"(sentence@1 startswith "A")"})};
}

std::vector<ResponseRecord> four_responses() {
  return {{"a", "A x.", std::nullopt},
          {"b", "A y.", std::nullopt},
          {"c", "Intro\nA z.", std::nullopt},
          {"d", "B.", std::nullopt}};
}

std::string fmt_id(int depth, int count, int k) {
  return std::to_string(depth) + "-" + std::to_string(count) + "-" + std::to_string(k);
}

void check_strict_le_loose(const EvalReport& r) {
  CHECK(r.overall.strict <= r.overall.loose);
  for (const auto& [k, s] : r.by_language) CHECK(s.strict <= s.loose);
  for (const auto& [k, s] : r.by_difficulty) CHECK(s.strict <= s.loose);
  for (const auto& [k, s] : r.cells) CHECK(s.strict <= s.loose);
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("instruction encoding round trips") {
    const std::vector<Instruction> data = generate_dataset([] {
      GenConfig c = GenConfig::defaults(Language::kZh);
      c.seed = 4;
      c.counts = {5, 5, 5};
      return c;
    }());
    std::istringstream in(encode_instructions(data));
    CHECK(read_instructions(in) == data);
  }

  TEST_CASE("rules decode from structured objects and DSL strings") {
    const Rule r = dsl::parse_rule("paragraph@1.pattern(/[0-9]+/)# >= 2");
    CHECK(rule_from_json(rule_to_json(r)) == r);
    CHECK(rule_from_json(nlohmann::json("paragraph@1.pattern(/[0-9]+/)# >= 2")) == r);
    CHECK_THROWS_AS(rule_from_json(nlohmann::json("word@1 > 5")), InvalidRule);
  }

  TEST_CASE("malformed records name their line") {
    const Instruction ok = make("x", Language::kEn, {"sentence# = 5"});
    const std::string good = instruction_to_json(ok).dump();
    auto line_of = [](const std::string& text) -> std::size_t {
      std::istringstream in(text);
      try {
        read_instructions(in);
      } catch (const DataError& e) {
        return e.line();
      }
      return 0;
    };
    CHECK(line_of(good + "\n{not json\n") == 2);
    CHECK(line_of(good + "\n" + good + "\n") == 2);

    nlohmann::json wrong = instruction_to_json(ok);
    wrong["difficulty"] = "hard";
    CHECK(line_of("\n" + wrong.dump() + "\n") == 2);

    std::istringstream dup("{\"id\":\"a\",\"response\":\"\"}\n{\"id\":\"a\",\"response\":\"x\"}\n");
    try {
      read_responses(dup);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(e.line() == 2);
      CHECK(std::string(e.what()).rfind("line 2: ", 0) == 0);
    }
  }

  TEST_CASE("unknown and duplicate response ids") {
    const auto instrs = four();
    auto responses = four_responses();
    responses.push_back({"zzz", "A.", std::nullopt});
    CHECK_THROWS_AS(score(instrs, responses), DataError);
    responses.back().id = "a";
    CHECK_THROWS_AS(score(instrs, responses), DataError);
  }

  TEST_CASE("fifty, seventy-five, twenty-five") {
    const EvalReport r = score(four(), four_responses());
    CHECK(r.overall.n == 4);
    CHECK(r.overall.strict == doctest::Approx(0.5));
    CHECK(r.overall.loose == doctest::Approx(0.75));
    CHECK(r.gain() == doctest::Approx(0.25));
    CHECK(percent(r.gain()) == "25.0");
    REQUIRE(r.verdicts.size() == 4);
    CHECK(r.verdicts[2].loose_variant == std::optional<std::string>("drop-first-line"));
  }

  TEST_CASE("empty responses fail every instruction with a non-count rule") {
    std::vector<Instruction> instrs = {make("a", Language::kEn, {R"(answer contain "x")"}),
                                       make("b", Language::kEn, {"sentence# = 0", R"(word@1 equal "hi")"}),
                                       make("c", Language::kZh, {R"(sentence@-1 endswith "。")"})};
    std::vector<ResponseRecord> responses;
    for (const auto& i : instrs) responses.push_back({i.id, "", std::nullopt});
    const EvalReport r = score(instrs, responses);
    CHECK(r.overall.strict == 0.0);
    CHECK(r.overall.loose == 0.0);
  }

  TEST_CASE("a single passing instruction is 100 percent everywhere") {
    const EvalReport r = score({make("a", Language::kZh, {"sentence# = 2"})}, {{"a", "你好。再见。", std::nullopt}});
    CHECK(r.overall == SliceStats{1, 1.0, 1.0});
    for (const auto& [k, s] : r.by_language) CHECK(s == SliceStats{1, 1.0, 1.0});
    for (const auto& [k, s] : r.by_difficulty) CHECK(s == SliceStats{1, 1.0, 1.0});
    for (const auto& [k, s] : r.cells) CHECK(s == SliceStats{1, 1.0, 1.0});
    CHECK(r.by_language.size() == 1);
  }

  TEST_CASE("missing responses are unscored, not failures") {
    auto responses = four_responses();
    responses.pop_back();
    const EvalReport r = score(four(), responses);
    CHECK(r.overall.n == 3);
    CHECK(r.unscored == std::vector<std::string>{"d"});
    CHECK(r.overall.strict == doctest::Approx(2.0 / 3.0));
  }

  TEST_CASE("strict only") {
    ScoreOptions o;
    o.strict_only = true;
    const EvalReport r = score(four(), four_responses(), o);
    CHECK(r.overall.loose == doctest::Approx(0.5));
  }

  TEST_CASE("slices partition and are consistent") {
    Rng rng(41);
    for (int round = 0; round < 50; ++round) {
      const auto verdicts = fixtures::random_verdicts(rng, static_cast<std::size_t>(uniform_int(rng, 1, 60)));
      const EvalReport r = aggregate(verdicts, {});
      check_strict_le_loose(r);
      std::size_t n_lang = 0, n_diff = 0, n_cell = 0;
      double weighted = 0;
      for (const auto& [k, s] : r.by_language) {
        n_lang += s.n;
        weighted += s.strict * static_cast<double>(s.n);
      }
      for (const auto& [k, s] : r.by_difficulty) n_diff += s.n;
      for (const auto& [k, s] : r.cells) n_cell += s.n;
      CHECK(n_lang == verdicts.size());
      CHECK(n_diff == verdicts.size());
      CHECK(n_cell == verdicts.size());
      CHECK(r.overall.strict == doctest::Approx(weighted / static_cast<double>(verdicts.size())));
    }
  }

  TEST_CASE("heatmap rows") {
    std::vector<InstructionVerdict> v;
    for (int d = 1; d <= 2; ++d) {
      for (int c = 1; c <= 2; ++c) {
        v.push_back({fmt_id(d, c, 0), Language::kEn, Difficulty::kEasy, d, c, true, true, "identity"});
        v.push_back({fmt_id(d, c, 1), Language::kEn, Difficulty::kEasy, d, c, false, false, std::nullopt});
      }
    }
    v.push_back({"extra", Language::kEn, Difficulty::kEasy, 1, 1, true, true, "identity"});
    const auto cells = heatmap(aggregate(v, {}));
    REQUIRE(cells.size() == 4);
    CHECK(cells[0].depth == 1);
    CHECK(cells[0].count == 1);
    CHECK(cells[0].n == 3);
    CHECK(cells[0].strict == doctest::Approx(2.0 / 3.0));
    CHECK(cells[3].depth == 2);
    CHECK(cells[3].count == 2);
    for (const auto& c : cells) CHECK(c.n > 0);
  }

  TEST_CASE("merge") {
    const EvalReport r = score(four(), four_responses(), {1, false, "m"});
    CHECK(merge_reports({r, r, r, r}) == r);

    EvalReport other = r;
    other.overall.strict = 0.25;
    other.verdicts.pop_back();
    const EvalReport merged = merge_reports({r, other});
    CHECK(merged.overall.strict == doctest::Approx(0.375));
    CHECK(merged.verdicts.empty());
  }

  TEST_CASE("structured and csv round trips") {
    Rng rng(44);
    for (int round = 0; round < 20; ++round) {
      EvalReport r = aggregate(fixtures::random_verdicts(rng, 30), {"u1", "u,2"}, "label \"x\"");
      CHECK(report_from_json(report_to_json(r)) == r);
      CHECK(parse_report(render_report(r, ReportFormat::kStructured)) == r);
      CHECK(parse_report(render_report(r, ReportFormat::kCsv)) == r);
    }
    CHECK_THROWS_AS(parse_report("kind,id\nbogus"), DataError);
  }

  TEST_CASE("jobs do not change the report") {
    GenConfig c = GenConfig::defaults(Language::kEn);
    c.seed = 9;
    c.counts = {10, 10, 10};
    const auto instrs = generate_dataset(c);
    Rng rng(45);
    std::vector<ResponseRecord> responses;
    for (const auto& i : instrs) responses.push_back({i.id, fixtures::synthetic_text(rng, i.language), std::nullopt});
    const EvalReport one = score(instrs, responses, {1, false, ""});
    const EvalReport eight = score(instrs, responses, {8, false, ""});
    CHECK(one == eight);
    check_strict_le_loose(one);
  }

  TEST_CASE("one-decimal gain") {
    std::vector<InstructionVerdict> v;
    for (int i = 0; i < 2475; ++i) {
      const bool strict = i < 563;
      const bool loose = i < 618;
      v.push_back({"i" + std::to_string(i), i % 2 ? Language::kEn : Language::kZh, Difficulty::kHard, 2, 3, strict, loose,
                   std::nullopt});
    }
    const EvalReport r = aggregate(v, {});
    CHECK(percent(r.overall.strict) == "22.7");
    CHECK(percent(r.overall.loose) == "25.0");
    CHECK(percent(r.gain()) == "2.2");
    const std::string table = render_report(r, ReportFormat::kTable);
    CHECK(table.find("| 2.2 |") != std::string::npos);
  }

  TEST_CASE("format names") {
    CHECK(parse_report_format("table") == ReportFormat::kTable);
    CHECK(parse_report_format("json") == ReportFormat::kStructured);
    CHECK(parse_report_format("csv") == ReportFormat::kCsv);
    CHECK_FALSE(parse_report_format("xml").has_value());
  }
}
