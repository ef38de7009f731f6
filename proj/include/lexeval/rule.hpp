#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <regex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace lexeval {

enum class Language { kEn, kZh };

enum class Level {
  kAnswer,
  kParagraph,
  kLine,
  kBullet,
  kSentence,
  kWord,
  kCharacter,
  kLetter,
  kPunc,
  kPattern,
};

inline constexpr Level kAllLevels[] = {
    Level::kAnswer, Level::kParagraph, Level::kLine,      Level::kBullet, Level::kSentence,
    Level::kWord,   Level::kCharacter, Level::kLetter,    Level::kPunc,   Level::kPattern,
};

enum class PredicateKind { kIndex, kAll, kBefore, kAfter, kBetween, kCount };

/// A selection or aggregation operator applied at one level.
/// `n` is meaningful for index (n >= 1 or n == -1), before and after (n >= 1).
struct Predicate {
  PredicateKind kind = PredicateKind::kAll;
  int n = 0;

  static Predicate index(int n) { return {PredicateKind::kIndex, n}; }
  static Predicate all() { return {PredicateKind::kAll, 0}; }
  static Predicate before(int n) { return {PredicateKind::kBefore, n}; }
  static Predicate after(int n) { return {PredicateKind::kAfter, n}; }
  static Predicate between() { return {PredicateKind::kBetween, 0}; }
  static Predicate count() { return {PredicateKind::kCount, 0}; }

  bool takes_ordinal() const {
    return kind == PredicateKind::kIndex || kind == PredicateKind::kBefore ||
           kind == PredicateKind::kAfter;
  }

  friend bool operator==(const Predicate& a, const Predicate& b) {
    return a.kind == b.kind && (!a.takes_ordinal() || a.n == b.n);
  }
};

enum class Relation {
  // numerical
  kEq,
  kNeq,
  kGt,
  kGte,
  kLt,
  kLte,
  // textual
  kStartsWith,
  kEndsWith,
  kEqual,
  kContain,
  kNotStartsWith,
  kNotEndsWith,
  kNotContain,
};

inline constexpr Relation kNumericalRelations[] = {Relation::kEq, Relation::kNeq, Relation::kGt,
                                                   Relation::kGte, Relation::kLt, Relation::kLte};
inline constexpr Relation kTextualRelations[] = {
    Relation::kStartsWith, Relation::kEndsWith,      Relation::kEqual,     Relation::kContain,
    Relation::kNotStartsWith, Relation::kNotEndsWith, Relation::kNotContain};

constexpr bool is_numerical(Relation r) { return r <= Relation::kLte; }

/// Integer count target or text target.
using Value = std::variant<std::int64_t, std::string>;

struct ProcedureStep {
  Level level = Level::kAnswer;
  Predicate predicate;
  /// Regular-expression source; present iff level == kPattern.
  std::optional<std::string> pattern;

  friend bool operator==(const ProcedureStep& a, const ProcedureStep& b) {
    return a.level == b.level && a.predicate == b.predicate && a.pattern == b.pattern;
  }
};

struct Rule {
  std::vector<ProcedureStep> procedure;
  Relation relation = Relation::kContain;
  Value value = std::string{};

  const ProcedureStep& terminal() const { return procedure.back(); }
  bool counts() const {
    return !procedure.empty() && procedure.back().predicate.kind == PredicateKind::kCount;
  }

  friend bool operator==(const Rule&, const Rule&) = default;
};

enum class Difficulty { kEasy, kMedium, kHard };

struct Instruction {
  std::string id;
  Language language = Language::kEn;
  std::string prompt;
  std::vector<Rule> rules;
  Difficulty difficulty = Difficulty::kEasy;
  int depth = 0;
  int count = 0;

  friend bool operator==(const Instruction&, const Instruction&) = default;
};

/// Stable violation codes reported by check_validity.
enum class Violation {
  kEmptyProcedure,
  kNumericalWithoutCount,
  kTextualWithCount,
  kValueTypeMismatch,
  kNegativeCount,
  kEmptyText,
  kRelationNotAllowedForBefore,
  kRelationNotAllowedForAfter,
  kRelationNotAllowedForBetween,
  kCountNotTerminal,
  kLevelNotDescending,
  kAnswerNotFirst,
  kAnswerPredicateNotAll,
  kInvalidIndex,
  kInvalidOrdinal,
  kPatternMissing,
  kPatternUnexpected,
  kPatternInvalid,
  kPatternNotTerminal,
  kPatternDelimiter,
};

struct Validity {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(Violation v) const;
};

Validity check_validity(const Rule& rule);

/// Thrown where an invalid rule reaches an API that requires a valid one.
class InvalidRule : public std::runtime_error {
 public:
  explicit InvalidRule(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

/// Throws InvalidRule unless check_validity(rule) is ok.
void require_valid(const Rule& rule);

/// Number of steps, answer included.
int procedure_depth(const Rule& rule);
int instruction_depth(const std::vector<Rule>& rules);

/// Granularity tier: answer 0, paragraph 1, line/bullet 2, sentence 3, word 4,
/// character/letter/punc 5. Pattern has no tier.
std::optional<int> level_tier(Level level);

bool relation_allowed(PredicateKind terminal, Relation relation);

std::string_view to_string(Level level);
std::string_view to_string(PredicateKind kind);
std::string_view to_string(Relation relation);
std::string_view to_string(Language language);
std::string_view to_string(Difficulty difficulty);
std::string_view to_string(Violation violation);
/// Symbolic spelling of numerical relations ("=", ">=", ...); textual
/// relations spell as their name.
std::string_view relation_symbol(Relation relation);

std::optional<Level> parse_level(std::string_view name);
std::optional<Relation> parse_relation(std::string_view name);
std::optional<Language> parse_language(std::string_view name);
std::optional<Difficulty> parse_difficulty(std::string_view name);
std::optional<PredicateKind> parse_predicate_kind(std::string_view name);

/// Compiles a pattern source as ECMAScript over code points.
/// Throws std::regex_error on invalid syntax.
std::shared_ptr<const std::wregex> compile_pattern(std::string_view source);

}  // namespace lexeval
