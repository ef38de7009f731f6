#include "lexeval/engine.hpp"

#include <stdexcept>

#include "lexeval/unicode.hpp"

namespace lexeval {

namespace {

std::vector<std::uint32_t> extend(const std::vector<std::uint32_t>& path, std::uint32_t ordinal) {
  auto out = path;
  out.push_back(ordinal);
  return out;
}

const std::wregex* pattern_of(const ProcedureStep& step,
                              std::shared_ptr<const std::wregex>& holder) {
  if (step.level != Level::kPattern) return nullptr;
  holder = compile_pattern(step.pattern.value_or(""));
  return holder.get();
}

bool compare_count(std::int64_t target, Relation relation, std::int64_t value) {
  switch (relation) {
    case Relation::kEq:
      return target == value;
    case Relation::kNeq:
      return target != value;
    case Relation::kGt:
      return target > value;
    case Relation::kGte:
      return target >= value;
    case Relation::kLt:
      return target < value;
    case Relation::kLte:
      return target <= value;
    default:
      return false;
  }
}

bool starts_with(std::u32string_view s, std::u32string_view p) {
  return s.size() >= p.size() && s.substr(0, p.size()) == p;
}

bool ends_with(std::u32string_view s, std::u32string_view p) {
  return s.size() >= p.size() && s.substr(s.size() - p.size()) == p;
}

bool compare_text(std::u32string_view target, Relation relation, std::u32string_view value) {
  switch (relation) {
    case Relation::kStartsWith:
      return starts_with(target, value);
    case Relation::kEndsWith:
      return ends_with(target, value);
    case Relation::kEqual:
      return target == value;
    case Relation::kContain:
      return target.find(value) != std::u32string_view::npos;
    case Relation::kNotStartsWith:
      return !starts_with(target, value);
    case Relation::kNotEndsWith:
      return !ends_with(target, value);
    case Relation::kNotContain:
      return target.find(value) == std::u32string_view::npos;
    default:
      return false;
  }
}

bool evaluate(const Rule& rule, std::u32string_view text, Language language) {
  Scope scope = Scope::whole(text, language);
  const std::size_t refine_steps = rule.counts() ? rule.procedure.size() - 1 : rule.procedure.size();
  for (std::size_t i = 0; i < refine_steps && scope.complete; ++i) {
    scope = refine_scope(scope, rule.procedure[i]);
  }
  return adjudicate(identify_target(scope, rule), rule.relation, rule.value);
}

std::string strip_asterisks(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    if (c != '*') out.push_back(c);
  }
  return out;
}

std::string drop_first_line(std::string_view text) {
  const auto nl = text.find('\n');
  return nl == std::string_view::npos ? std::string() : std::string(text.substr(nl + 1));
}

std::string drop_last_line(std::string_view text) {
  const auto nl = text.rfind('\n');
  return nl == std::string_view::npos ? std::string() : std::string(text.substr(0, nl));
}

bool all_rules_pass(const Instruction& instruction, std::u32string_view text) {
  for (const Rule& rule : instruction.rules) {
    if (!evaluate(rule, text, instruction.language)) return false;
  }
  return true;
}

}  // namespace

Scope Scope::whole(std::u32string_view text, Language language) {
  Scope scope;
  scope.text = text;
  scope.language = language;
  scope.segments.push_back({{0, text.size()}, {}});
  return scope;
}

bool Target::empty() const {
  return std::visit([](const auto& v) { return v.empty(); }, value);
}

Scope refine_scope(const Scope& scope, const ProcedureStep& step) {
  if (step.predicate.kind == PredicateKind::kCount) {
    throw std::invalid_argument("refine_scope: count is not a selection");
  }
  std::shared_ptr<const std::wregex> holder;
  const std::wregex* re = pattern_of(step, holder);

  Scope next;
  next.text = scope.text;
  next.language = scope.language;
  next.complete = scope.complete;

  for (const Segment& seg : scope.segments) {
    const std::u32string_view parent = scope.segment_text(seg);
    const std::size_t base = seg.span.start;
    const auto elements = segment(parent, step.level, scope.language, re);
    const auto count = static_cast<long long>(elements.size());
    const std::size_t before = next.segments.size();

    auto emit = [&](std::size_t s, std::size_t e, std::uint32_t ordinal) {
      next.segments.push_back({{base + s, base + e}, extend(seg.path, ordinal)});
    };

    const Predicate& pred = step.predicate;
    switch (pred.kind) {
      case PredicateKind::kIndex: {
        const long long idx = pred.n == -1 ? count : pred.n;
        if (idx >= 1 && idx <= count) {
          const Span sp = elements[static_cast<std::size_t>(idx - 1)].span;
          emit(sp.start, sp.end, static_cast<std::uint32_t>(idx));
        }
        break;
      }
      case PredicateKind::kAll:
        for (std::size_t i = 0; i < elements.size(); ++i) {
          emit(elements[i].span.start, elements[i].span.end, static_cast<std::uint32_t>(i + 1));
        }
        break;
      case PredicateKind::kBefore:
        if (pred.n >= 1 && pred.n <= count) {
          emit(0, elements[static_cast<std::size_t>(pred.n - 1)].span.start, 0);
        }
        break;
      case PredicateKind::kAfter:
        if (pred.n >= 1 && pred.n <= count) {
          emit(elements[static_cast<std::size_t>(pred.n - 1)].span.end, parent.size(), 0);
        }
        break;
      case PredicateKind::kBetween:
        for (const Element& gap : gaps(elements, parent)) emit(gap.span.start, gap.span.end, 0);
        break;
      case PredicateKind::kCount:
        break;
    }
    if (next.segments.size() == before) next.complete = false;
  }
  return next;
}

Target identify_target(const Scope& scope, const Rule& rule) {
  if (!rule.counts()) {
    std::vector<std::u32string_view> texts;
    if (scope.complete) {
      texts.reserve(scope.segments.size());
      for (const Segment& seg : scope.segments) texts.push_back(scope.segment_text(seg));
    }
    return {std::move(texts)};
  }

  std::vector<std::int64_t> counts;
  if (scope.complete) {
    const ProcedureStep& step = rule.terminal();
    std::shared_ptr<const std::wregex> holder;
    const std::wregex* re = pattern_of(step, holder);
    counts.reserve(scope.segments.size());
    for (const Segment& seg : scope.segments) {
      counts.push_back(static_cast<std::int64_t>(
          segment(scope.segment_text(seg), step.level, scope.language, re).size()));
    }
  }
  return {std::move(counts)};
}

bool adjudicate(const Target& target, Relation relation, const Value& value) {
  if (target.empty()) return false;
  if (const auto* counts = std::get_if<std::vector<std::int64_t>>(&target.value)) {
    const auto* expected = std::get_if<std::int64_t>(&value);
    if (!expected || !is_numerical(relation)) return false;
    for (std::int64_t c : *counts) {
      if (!compare_count(c, relation, *expected)) return false;
    }
    return true;
  }
  const auto* expected = std::get_if<std::string>(&value);
  if (!expected || is_numerical(relation)) return false;
  const std::u32string needle = unicode::decode(*expected);
  for (std::u32string_view t : std::get<std::vector<std::u32string_view>>(target.value)) {
    if (!compare_text(t, relation, needle)) return false;
  }
  return true;
}

bool verify_rule(const Rule& rule, std::u32string_view full_text, Language language) {
  require_valid(rule);
  return evaluate(rule, full_text, language);
}

bool verify_rule(const Rule& rule, std::string_view full_text, Language language) {
  require_valid(rule);
  const std::u32string text = unicode::decode(full_text);
  return evaluate(rule, text, language);
}

std::vector<LooseVariant> loose_variants(std::string_view full_text) {
  const std::string first = drop_first_line(full_text);
  const std::string last = drop_last_line(full_text);
  const std::string both = drop_last_line(first);
  return {
      {std::string(kLooseVariantIds[0]), std::string(full_text)},
      {std::string(kLooseVariantIds[1]), strip_asterisks(full_text)},
      {std::string(kLooseVariantIds[2]), first},
      {std::string(kLooseVariantIds[3]), last},
      {std::string(kLooseVariantIds[4]), both},
      {std::string(kLooseVariantIds[5]), strip_asterisks(first)},
      {std::string(kLooseVariantIds[6]), strip_asterisks(last)},
      {std::string(kLooseVariantIds[7]), strip_asterisks(both)},
  };
}

Verdict verify_instruction(const Instruction& instruction, std::string_view response,
                           bool strict_only) {
  for (const Rule& rule : instruction.rules) require_valid(rule);

  Verdict verdict;
  const std::u32string raw = unicode::decode(response);
  verdict.strict_pass = true;
  for (const Rule& rule : instruction.rules) {
    const bool ok = evaluate(rule, raw, instruction.language);
    verdict.rule_results.push_back(ok);
    verdict.strict_pass = verdict.strict_pass && ok;
  }

  if (verdict.strict_pass) {
    verdict.loose_pass = true;
    verdict.loose_variant = std::string(kLooseVariantIds[0]);
    return verdict;
  }
  if (strict_only) return verdict;

  auto variants = loose_variants(response);
  for (std::size_t i = 1; i < variants.size(); ++i) {
    const std::u32string text = unicode::decode(variants[i].text);
    if (all_rules_pass(instruction, text)) {
      verdict.loose_pass = true;
      verdict.loose_variant = std::move(variants[i].id);
      break;
    }
  }
  return verdict;
}

}  // namespace lexeval
