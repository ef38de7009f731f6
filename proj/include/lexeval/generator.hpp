#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "lexeval/render.hpp"
#include "lexeval/rule.hpp"

namespace lexeval {

/// Candidate literals for text values.
struct Lexicon {
  std::vector<std::string> words;       // single words / short tokens
  std::vector<std::string> phrases;     // multi-word or multi-character phrases
  std::vector<std::string> characters;  // single CJK characters
  std::vector<std::string> letters;     // single ASCII letters
  std::vector<std::string> punctuation; // single punctuation marks
  std::vector<std::string> endings;     // sentence-final strings
  std::vector<std::string> patterns;    // regular-expression sources

  static Lexicon builtin(Language language);
};

struct GenConfig {
  std::uint64_t seed = 0;
  Language language = Language::kEn;
  std::array<int, 3> counts{0, 0, 0};  // easy, medium, hard
  int max_depth = 3;                   // 1..4
  int max_constraints = 5;             // 1..5
  Lexicon lexicon;
  std::vector<std::string> seed_tasks;

  static GenConfig defaults(Language language);
  /// std::invalid_argument describing the first problem found.
  void validate() const;
};

struct DifficultyScore {
  std::vector<double> per_constraint;
  double multiplier = 1.0;
  double total = 0.0;
  Difficulty grade = Difficulty::kEasy;
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a bucket cannot be filled within the attempt budget.
class BucketUnfillable : public GenerationError {
 public:
  BucketUnfillable(std::array<int, 3> shortfall, const std::string& message)
      : GenerationError(message), shortfall_(shortfall) {}
  /// Missing instructions per bucket (easy, medium, hard).
  const std::array<int, 3>& shortfall() const { return shortfall_; }

 private:
  std::array<int, 3> shortfall_;
};

using Rng = std::mt19937_64;

/// Uniform integer in [lo, hi], independent of the standard library's
/// distribution implementation.
std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi);

/// Score of a single constraint: depth + predicate load + relation strictness
/// + value complexity.
double constraint_score(const Rule& rule);

/// Sum of constraint scores times 1 + 0.25 * (count - 1). Easy up to 2,
/// medium up to 5, hard above.
DifficultyScore grade_difficulty(const std::vector<Rule>& rules);

/// Draws one valid rule: terminal predicate first, then a relation allowed for
/// it, then a value of the matching type. Throws GenerationError when the
/// lexicon has no candidates for the required value.
Rule sample_rule(const GenConfig& config, Rng& rng);

/// False when two rules cannot both hold, e.g. "sentence# = 3" with
/// "sentence# > 4", or "contain X" with "notcontain X" on the same procedure.
bool rules_compatible(const std::vector<Rule>& rules);

/// Veto hook; returning false rejects the candidate instruction.
using ScreenFn = std::function<bool(const Instruction&)>;

inline constexpr int kAttemptsPerSlot = 10000;

/// Rejection-samples instructions until every difficulty bucket holds exactly
/// its requested count. Rule multisets are unique across the dataset.
std::vector<Instruction> generate_dataset(const GenConfig& config,
                                          const TemplateSet& templates = TemplateSet::builtin(),
                                          const ScreenFn& screen = {});

/// Deterministic instruction id for (seed, language, index).
std::string instruction_id(std::uint64_t seed, Language language, std::size_t index);

/// Order-independent key of a rule multiset.
std::string rule_multiset_key(const std::vector<Rule>& rules);

}  // namespace lexeval
