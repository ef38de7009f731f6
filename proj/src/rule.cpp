#include "lexeval/rule.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <shared_mutex>

#include "lexeval/unicode.hpp"

namespace lexeval {

namespace {

struct LevelName {
  Level level;
  std::string_view name;
};

constexpr LevelName kLevelNames[] = {
    {Level::kAnswer, "answer"},       {Level::kParagraph, "paragraph"}, {Level::kLine, "line"},
    {Level::kBullet, "bullet"},       {Level::kSentence, "sentence"},   {Level::kWord, "word"},
    {Level::kCharacter, "character"}, {Level::kLetter, "letter"},       {Level::kPunc, "punc"},
    {Level::kPattern, "pattern"},
};

struct RelationName {
  Relation relation;
  std::string_view name;
  std::string_view symbol;
};

constexpr RelationName kRelationNames[] = {
    {Relation::kEq, "eq", "="},
    {Relation::kNeq, "neq", "!="},
    {Relation::kGt, "gt", ">"},
    {Relation::kGte, "gte", ">="},
    {Relation::kLt, "lt", "<"},
    {Relation::kLte, "lte", "<="},
    {Relation::kStartsWith, "startswith", "startswith"},
    {Relation::kEndsWith, "endswith", "endswith"},
    {Relation::kEqual, "equal", "equal"},
    {Relation::kContain, "contain", "contain"},
    {Relation::kNotStartsWith, "notstartswith", "notstartswith"},
    {Relation::kNotEndsWith, "notendswith", "notendswith"},
    {Relation::kNotContain, "notcontain", "notcontain"},
};

void add(std::vector<Violation>& out, Violation v) {
  if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
}

}  // namespace

bool Validity::has(Violation v) const {
  return std::find(violations.begin(), violations.end(), v) != violations.end();
}

std::optional<int> level_tier(Level level) {
  switch (level) {
    case Level::kAnswer:
      return 0;
    case Level::kParagraph:
      return 1;
    case Level::kLine:
    case Level::kBullet:
      return 2;
    case Level::kSentence:
      return 3;
    case Level::kWord:
      return 4;
    case Level::kCharacter:
    case Level::kLetter:
    case Level::kPunc:
      return 5;
    case Level::kPattern:
      return std::nullopt;
  }
  return std::nullopt;
}

bool relation_allowed(PredicateKind terminal, Relation relation) {
  if (terminal == PredicateKind::kCount) return is_numerical(relation);
  if (is_numerical(relation)) return false;
  switch (terminal) {
    case PredicateKind::kIndex:
    case PredicateKind::kAll:
      return true;
    case PredicateKind::kBefore:
      return relation == Relation::kContain || relation == Relation::kNotContain;
    case PredicateKind::kAfter:
      return relation == Relation::kContain || relation == Relation::kNotContain ||
             relation == Relation::kEqual;
    case PredicateKind::kBetween:
      return relation == Relation::kEqual;
    case PredicateKind::kCount:
      break;
  }
  return false;
}

Validity check_validity(const Rule& rule) {
  Validity result;
  auto& out = result.violations;
  if (rule.procedure.empty()) {
    add(out, Violation::kEmptyProcedure);
    return result;
  }

  const std::size_t last = rule.procedure.size() - 1;
  for (std::size_t i = 0; i <= last; ++i) {
    const ProcedureStep& step = rule.procedure[i];
    const Predicate& pred = step.predicate;

    if (step.level == Level::kAnswer) {
      if (i != 0) add(out, Violation::kAnswerNotFirst);
      if (pred.kind != PredicateKind::kAll) add(out, Violation::kAnswerPredicateNotAll);
    }
    if (pred.kind == PredicateKind::kIndex && (pred.n == 0 || pred.n < -1)) {
      add(out, Violation::kInvalidIndex);
    }
    if ((pred.kind == PredicateKind::kBefore || pred.kind == PredicateKind::kAfter) && pred.n < 1) {
      add(out, Violation::kInvalidOrdinal);
    }
    if (pred.kind == PredicateKind::kCount && i != last) add(out, Violation::kCountNotTerminal);

    if (step.level == Level::kPattern) {
      if (!step.pattern) {
        add(out, Violation::kPatternMissing);
      } else {
        if (step.pattern->find("/)") != std::string::npos) add(out, Violation::kPatternDelimiter);
        if (step.pattern->empty()) {
          add(out, Violation::kPatternInvalid);
        } else {
          try {
            compile_pattern(*step.pattern);
          } catch (const std::regex_error&) {
            add(out, Violation::kPatternInvalid);
          }
        }
      }
      if (i != last) add(out, Violation::kPatternNotTerminal);
    } else if (step.pattern) {
      add(out, Violation::kPatternUnexpected);
    }

    if (i > 0 && step.level != Level::kPattern) {
      const auto prev = level_tier(rule.procedure[i - 1].level);
      const auto cur = level_tier(step.level);
      // A pattern predecessor is already flagged as non-terminal.
      if (prev && cur && *cur <= *prev) add(out, Violation::kLevelNotDescending);
    }
  }

  const PredicateKind terminal = rule.procedure[last].predicate.kind;
  const bool numerical = is_numerical(rule.relation);
  if (numerical && terminal != PredicateKind::kCount) add(out, Violation::kNumericalWithoutCount);
  if (!numerical && terminal == PredicateKind::kCount) add(out, Violation::kTextualWithCount);
  if (!numerical) {
    if (terminal == PredicateKind::kBefore && !relation_allowed(terminal, rule.relation)) {
      add(out, Violation::kRelationNotAllowedForBefore);
    }
    if (terminal == PredicateKind::kAfter && !relation_allowed(terminal, rule.relation)) {
      add(out, Violation::kRelationNotAllowedForAfter);
    }
    if (terminal == PredicateKind::kBetween && !relation_allowed(terminal, rule.relation)) {
      add(out, Violation::kRelationNotAllowedForBetween);
    }
  }

  if (const auto* n = std::get_if<std::int64_t>(&rule.value)) {
    if (!numerical) add(out, Violation::kValueTypeMismatch);
    if (*n < 0) add(out, Violation::kNegativeCount);
  } else {
    const auto& text = std::get<std::string>(rule.value);
    if (numerical) add(out, Violation::kValueTypeMismatch);
    if (text.empty()) add(out, Violation::kEmptyText);
  }
  return result;
}

InvalidRule::InvalidRule(std::vector<Violation> violations)
    : std::runtime_error([&] {
        std::string msg = "invalid rule:";
        for (Violation v : violations) {
          msg += ' ';
          msg += to_string(v);
        }
        return msg;
      }()),
      violations_(std::move(violations)) {}

void require_valid(const Rule& rule) {
  auto validity = check_validity(rule);
  if (!validity.ok()) throw InvalidRule(std::move(validity.violations));
}

int procedure_depth(const Rule& rule) { return static_cast<int>(rule.procedure.size()); }

int instruction_depth(const std::vector<Rule>& rules) {
  int depth = 0;
  for (const Rule& r : rules) depth = std::max(depth, procedure_depth(r));
  return depth;
}

std::string_view to_string(Level level) {
  for (const auto& entry : kLevelNames) {
    if (entry.level == level) return entry.name;
  }
  return "?";
}

std::string_view to_string(PredicateKind kind) {
  switch (kind) {
    case PredicateKind::kIndex:
      return "index";
    case PredicateKind::kAll:
      return "all";
    case PredicateKind::kBefore:
      return "before";
    case PredicateKind::kAfter:
      return "after";
    case PredicateKind::kBetween:
      return "between";
    case PredicateKind::kCount:
      return "count";
  }
  return "?";
}

std::string_view to_string(Relation relation) {
  for (const auto& entry : kRelationNames) {
    if (entry.relation == relation) return entry.name;
  }
  return "?";
}

std::string_view relation_symbol(Relation relation) {
  for (const auto& entry : kRelationNames) {
    if (entry.relation == relation) return entry.symbol;
  }
  return "?";
}

std::string_view to_string(Language language) {
  return language == Language::kEn ? "en" : "zh";
}

std::string_view to_string(Difficulty difficulty) {
  switch (difficulty) {
    case Difficulty::kEasy:
      return "easy";
    case Difficulty::kMedium:
      return "medium";
    case Difficulty::kHard:
      return "hard";
  }
  return "?";
}

std::string_view to_string(Violation violation) {
  switch (violation) {
    case Violation::kEmptyProcedure:
      return "empty-procedure";
    case Violation::kNumericalWithoutCount:
      return "numerical-without-count";
    case Violation::kTextualWithCount:
      return "textual-with-count";
    case Violation::kValueTypeMismatch:
      return "value-type-mismatch";
    case Violation::kNegativeCount:
      return "negative-count";
    case Violation::kEmptyText:
      return "empty-text";
    case Violation::kRelationNotAllowedForBefore:
      return "relation-not-allowed-for-before";
    case Violation::kRelationNotAllowedForAfter:
      return "relation-not-allowed-for-after";
    case Violation::kRelationNotAllowedForBetween:
      return "relation-not-allowed-for-between";
    case Violation::kCountNotTerminal:
      return "count-not-terminal";
    case Violation::kLevelNotDescending:
      return "level-not-descending";
    case Violation::kAnswerNotFirst:
      return "answer-not-first";
    case Violation::kAnswerPredicateNotAll:
      return "answer-predicate-not-all";
    case Violation::kInvalidIndex:
      return "invalid-index";
    case Violation::kInvalidOrdinal:
      return "invalid-ordinal";
    case Violation::kPatternMissing:
      return "pattern-missing";
    case Violation::kPatternUnexpected:
      return "pattern-unexpected";
    case Violation::kPatternInvalid:
      return "pattern-invalid";
    case Violation::kPatternNotTerminal:
      return "pattern-not-terminal";
    case Violation::kPatternDelimiter:
      return "pattern-delimiter";
  }
  return "?";
}

std::optional<Level> parse_level(std::string_view name) {
  for (const auto& entry : kLevelNames) {
    if (entry.name == name) return entry.level;
  }
  return std::nullopt;
}

std::optional<Relation> parse_relation(std::string_view name) {
  for (const auto& entry : kRelationNames) {
    if (entry.name == name || entry.symbol == name) return entry.relation;
  }
  return std::nullopt;
}

std::optional<Language> parse_language(std::string_view name) {
  if (name == "en") return Language::kEn;
  if (name == "zh" || name == "cn") return Language::kZh;
  return std::nullopt;
}

std::optional<Difficulty> parse_difficulty(std::string_view name) {
  if (name == "easy") return Difficulty::kEasy;
  if (name == "medium") return Difficulty::kMedium;
  if (name == "hard") return Difficulty::kHard;
  return std::nullopt;
}

std::optional<PredicateKind> parse_predicate_kind(std::string_view name) {
  for (auto kind : {PredicateKind::kIndex, PredicateKind::kAll, PredicateKind::kBefore,
                    PredicateKind::kAfter, PredicateKind::kBetween, PredicateKind::kCount}) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

std::shared_ptr<const std::wregex> compile_pattern(std::string_view source) {
  static std::shared_mutex mutex;
  static std::map<std::string, std::shared_ptr<const std::wregex>, std::less<>> cache;
  {
    std::shared_lock lock(mutex);
    if (auto it = cache.find(source); it != cache.end()) return it->second;
  }
  auto compiled = std::make_shared<const std::wregex>(
      unicode::to_wide(unicode::decode(source)), std::regex::ECMAScript);
  std::unique_lock lock(mutex);
  return cache.emplace(std::string(source), std::move(compiled)).first->second;
}

}  // namespace lexeval
