// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "lexeval/codec.hpp"
#include "lexeval/dsl.hpp"
#include "lexeval/engine.hpp"
#include "lexeval/generator.hpp"
#include "lexeval/harness.hpp"
#include "oracle/oracle.hpp"
#include "support/fixtures.hpp"

using namespace lexeval;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(bool pass, std::string_view name, const std::string& detail) {
  std::cout << (pass ? "PASS " : "FAIL ") << name << ": " << detail << std::endl;
  if (!pass) ++failures;
}

// Runs a criterion, turning an escaped exception into a FAIL line.
void criterion(std::string_view name, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(false, name, std::string("exception: ") + e.what());
  }
}

constexpr int kOracleCases = 10000;
constexpr double kOracleSeconds = 60.0;
constexpr int kClosureRules = 10000;
constexpr int kInvariantFixtures = 1000;
constexpr double kDatasetSeconds = 300.0;
constexpr int kRoundTripRules = 10000;
constexpr double kScoreSeconds = 5.0;

struct Shape {
  Language language;
  std::array<int, 3> counts;
};
constexpr Shape kShapes[] = {{Language::kEn, {321, 372, 550}}, {Language::kZh, {332, 372, 528}}};
constexpr std::uint64_t kDatasetSeed = 2025;

GenConfig shape_config(const Shape& shape) {
  GenConfig c = GenConfig::defaults(shape.language);
  c.seed = kDatasetSeed;
  c.counts = shape.counts;
  return c;
}

bool strict_le_loose(const EvalReport& r) {
  bool ok = r.overall.strict <= r.overall.loose;
  for (const auto& [k, s] : r.by_language) ok = ok && s.strict <= s.loose;
  for (const auto& [k, s] : r.by_difficulty) ok = ok && s.strict <= s.loose;
  for (const auto& [k, s] : r.cells) ok = ok && s.strict <= s.loose;
  return ok;
}

std::vector<ResponseRecord> synthetic_responses(const std::vector<Instruction>& instrs, Rng& rng,
                                                std::size_t max_code_points) {
  std::vector<ResponseRecord> out;
  out.reserve(instrs.size());
  for (const auto& i : instrs) out.push_back({i.id, fixtures::synthetic_text(rng, i.language, max_code_points), std::nullopt});
  return out;
}

}  // namespace

int main() {
  std::vector<Instruction> dataset;  // both languages, filled by the shape criterion
  std::string first_encoding;

  criterion("oracle-equivalence", [] {
    const auto start = Clock::now();
    Rng rng(101);
    int agree = 0, total = 0, holding = 0;
    std::set<Level> terminals;
    std::string first_mismatch;
    for (Language lang : {Language::kEn, Language::kZh}) {
      for (int i = 0; i < kOracleCases; ++i) {
        const std::string text = fixtures::synthetic_text(rng, lang, 500);
        const Rule rule = fixtures::case_rule(rng, lang, text);
        const bool verdict = verify_rule(rule, text, lang);
        const bool same = verdict == oracle::verify(rule, text, lang);
        agree += same;
        holding += verdict;
        terminals.insert(rule.terminal().level);
        ++total;
        if (!same && first_mismatch.empty()) first_mismatch = dsl::format_rule(rule);
      }
    }
    const double secs = seconds_since(start);
    std::string detail =
        fmt::format("{}/{} agree ({} per language, {} rules hold, {} terminal levels), {:.1f} s (limit {:.0f} s)",
                    agree, total, kOracleCases, holding, terminals.size(), secs, kOracleSeconds);
    if (!first_mismatch.empty()) detail += "; first mismatch: " + first_mismatch;
    report(agree == total && secs < kOracleSeconds, "oracle-equivalence", detail);
  });

  criterion("grammar-closure", [] {
    Rng rng(102);
    const GenConfig en = GenConfig::defaults(Language::kEn);
    const GenConfig zh = GenConfig::defaults(Language::kZh);
    int valid = 0;
    for (int i = 0; i < kClosureRules; ++i) valid += check_validity(sample_rule(i % 2 ? en : zh, rng)).ok();
    const auto violators = fixtures::table_violations();
    int accepted = 0;
    for (const Rule& r : violators) accepted += check_validity(r).ok();
    report(valid == kClosureRules && accepted == 0 && violators.size() == 20, "grammar-closure",
           fmt::format("{}/{} sampled rules valid; {}/{} table violators accepted", valid, kClosureRules, accepted,
                       violators.size()));
  });

  criterion("dataset-shape", [&] {
    bool ok = true;
    std::string detail;
    for (const Shape& shape : kShapes) {
      const auto start = Clock::now();
      auto data = generate_dataset(shape_config(shape));
      const double secs = seconds_since(start);
      std::array<int, 3> per{0, 0, 0};
      std::set<std::string> keys;
      bool valid = true;
      for (const auto& i : data) {
        ++per[static_cast<int>(i.difficulty)];
        keys.insert(rule_multiset_key(i.rules));
        for (const Rule& r : i.rules) valid = valid && check_validity(r).ok();
        valid = valid && grade_difficulty(i.rules).grade == i.difficulty;
      }
      const std::size_t dups = data.size() - keys.size();
      ok = ok && per == shape.counts && dups == 0 && valid && secs < kDatasetSeconds;
      detail += fmt::format("{}{} {}/{}/{} (total {}), {} duplicate multisets, {:.1f} s", detail.empty() ? "" : "; ",
                            to_string(shape.language), per[0], per[1], per[2], data.size(), dups, secs);
      if (shape.language == Language::kEn) first_encoding = encode_instructions(data);
      dataset.insert(dataset.end(), data.begin(), data.end());
    }
    report(ok && dataset.size() == 2475, "dataset-shape",
           detail + fmt::format("; combined {} (limit {:.0f} s each)", dataset.size(), kDatasetSeconds));
  });

  criterion("strict-le-loose", [&] {
    Rng rng(104);
    std::vector<Instruction> pool = dataset;
    if (pool.empty()) {
      GenConfig c = GenConfig::defaults(Language::kEn);
      c.counts = {50, 50, 50};
      pool = generate_dataset(c);
    }
    int holding = 0;
    for (int f = 0; f < kInvariantFixtures; ++f) {
      std::vector<Instruction> pick;
      const auto n = uniform_int(rng, 1, 40);
      std::set<std::size_t> used;
      for (std::int64_t k = 0; k < n; ++k) {
        const auto idx = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(pool.size()) - 1));
        if (used.insert(idx).second) pick.push_back(pool[idx]);
      }
      const EvalReport r = score(pick, synthetic_responses(pick, rng, 500));
      holding += strict_le_loose(r);
    }
    report(holding == kInvariantFixtures, "strict-le-loose",
           fmt::format("{}/{} randomized fixtures hold at every slice", holding, kInvariantFixtures));
  });

  criterion("round-trip", [&] {
    Rng rng(105);
    const GenConfig en = GenConfig::defaults(Language::kEn);
    const GenConfig zh = GenConfig::defaults(Language::kZh);
    int same = 0;
    for (int i = 0; i < kRoundTripRules; ++i) {
      const Rule r = i % 4 == 0   ? fixtures::random_rule(rng, Language::kEn)
                     : i % 4 == 1 ? fixtures::random_rule(rng, Language::kZh)
                                  : sample_rule(i % 2 ? en : zh, rng);
      same += dsl::parse_rule(dsl::format_rule(r)) == r;
    }
    std::istringstream in(encode_instructions(dataset));
    const bool instructions_ok = !dataset.empty() && read_instructions(in) == dataset;
    int reports_ok = 0;
    constexpr int kReports = 50;
    for (int k = 0; k < kReports; ++k) {
      const EvalReport r = aggregate(fixtures::random_verdicts(rng, 200), {"missing-1", "missing,2"}, "run " + std::to_string(k));
      reports_ok += parse_report(render_report(r, ReportFormat::kStructured)) == r &&
                    parse_report(render_report(r, ReportFormat::kCsv)) == r;
    }
    report(same == kRoundTripRules && instructions_ok && reports_ok == kReports, "round-trip",
           fmt::format("{}/{} DSL rules; {} instructions {}; {}/{} reports (structured and csv)", same,
                       kRoundTripRules, dataset.size(), instructions_ok ? "lossless" : "LOSSY", reports_ok, kReports));
  });

  criterion("determinism", [&] {
    const std::string again = encode_instructions(generate_dataset(shape_config(kShapes[0])));
    const bool bytes = !first_encoding.empty() && again == first_encoding;
    Rng rng(106);
    const auto responses = synthetic_responses(dataset, rng, 1000);
    const EvalReport one = score(dataset, responses, {1, false, ""});
    const EvalReport eight = score(dataset, responses, {8, false, ""});
    report(bytes && one == eight && !dataset.empty(), "determinism",
           fmt::format("regenerated en dataset {} ({} bytes); jobs 1 vs 8 reports {}",
                       bytes ? "byte-identical" : "DIFFERS", again.size(), one == eight ? "identical" : "DIFFER"));
  });

  criterion("performance", [&] {
    Rng rng(107);
    const auto responses = synthetic_responses(dataset, rng, 2000);
    const auto start = Clock::now();
    const EvalReport r = score(dataset, responses, {1, false, ""});
    const double secs = seconds_since(start);
    report(r.overall.n == 2475 && secs < kScoreSeconds, "performance",
           fmt::format("scored {} instructions single-threaded in {:.2f} s (limit {:.0f} s)", r.overall.n, secs,
                       kScoreSeconds));
  });

  criterion("report-fidelity", [] {
    std::vector<InstructionVerdict> v;
    for (int i = 0; i < 2475; ++i) {
      const bool strict = i < 563;
      const bool loose = i < 618;
      v.push_back({"v" + std::to_string(i), i % 2 ? Language::kEn : Language::kZh, Difficulty::kMedium, 2, 2, strict,
                   loose, loose ? std::optional<std::string>(strict ? "identity" : "drop-first-line") : std::nullopt});
    }
    const EvalReport r = aggregate(v, {}, "fixture");
    const std::string table = render_report(r, ReportFormat::kTable);
    const bool ok = percent(r.overall.strict) == "22.7" && percent(r.overall.loose) == "25.0" &&
                    table.find("| 25.0 | 2.2 |") != std::string::npos;
    report(ok, "report-fidelity",
           fmt::format("strict {} / loose {} renders Gain {}", percent(r.overall.strict), percent(r.overall.loose),
                       percent(r.gain())));
  });

  return failures;
}
