#pragma once

#include <string>
#include <vector>

#include "lexeval/generator.hpp"
#include "lexeval/harness.hpp"
#include "lexeval/rule.hpp"

namespace fixtures {

using lexeval::Language;
using lexeval::Rng;
using lexeval::Rule;

/// Response-like text of at most `max_code_points` code points: paragraphs,
/// bullets, abbreviations, asterisks, CRLF breaks, mixed scripts.
std::string synthetic_text(Rng& rng, Language language, std::size_t max_code_points = 500);

/// Any valid rule, not just the generator's distribution (depth up to 4,
/// every level, every predicate the grammar allows).
Rule random_rule(Rng& rng, Language language);

/// Replaces the value with one read off `text` along the rule's path, so a
/// good share of rules hold. Leaves the rule alone when nothing is selected.
Rule tune_value(Rule rule, const std::string& text, Language language, Rng& rng);

/// Generator rule or random rule, half the time tuned to `text`.
Rule case_rule(Rng& rng, Language language, const std::string& text);

/// The twenty rules that break the relation table, one per forbidden
/// pairing.
std::vector<Rule> table_violations();

/// Verdicts over random languages, difficulties, depths and counts, with
/// loose_pass implied by strict_pass.
std::vector<lexeval::InstructionVerdict> random_verdicts(Rng& rng, std::size_t n);

/// Temporary directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string path(const std::string& name) const;
  void write(const std::string& name, const std::string& content) const;
  std::string read(const std::string& name) const;

 private:
  std::string root_;
};

}  // namespace fixtures
