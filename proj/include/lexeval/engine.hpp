#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lexeval/rule.hpp"
#include "lexeval/segmenter.hpp"

namespace lexeval {

/// A selected region of the response. `path` records the 1-based element
/// ordinal chosen at each refinement (0 for regions that are not a single
/// element: before/after/between selections).
struct Segment {
  Span span;
  std::vector<std::uint32_t> path;
};

/// The working set of the verifier. `text` is the full response and must
/// outlive the scope.
///
/// `complete` turns false once some segment produced no sub-segments: under
/// universal quantification a branch that selects nothing fails the rule, even
/// when other branches still have content.
struct Scope {
  std::u32string_view text;
  Language language = Language::kEn;
  std::vector<Segment> segments;
  bool complete = true;

  static Scope whole(std::u32string_view text, Language language);
  std::u32string_view segment_text(const Segment& s) const {
    return text.substr(s.span.start, s.span.size());
  }
};

/// Counts per surviving segment, or the extracted texts.
struct Target {
  std::variant<std::vector<std::int64_t>, std::vector<std::u32string_view>> value;

  bool empty() const;
};

struct Verdict {
  std::vector<bool> rule_results;
  bool strict_pass = false;
  bool loose_pass = false;
  std::optional<std::string> loose_variant;

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

/// Applies one non-count step to every segment in order. Out-of-range
/// selections contribute nothing. Throws std::invalid_argument on a count step.
Scope refine_scope(const Scope& scope, const ProcedureStep& step);

/// Expects `scope` refined through every step but the last when the rule
/// counts, through every step otherwise. An incomplete scope yields an empty
/// target.
Target identify_target(const Scope& scope, const Rule& rule);

/// False on an empty target; otherwise every entry must satisfy the relation.
bool adjudicate(const Target& target, Relation relation, const Value& value);

/// Throws InvalidRule for rules failing check_validity.
bool verify_rule(const Rule& rule, std::string_view full_text, Language language);
bool verify_rule(const Rule& rule, std::u32string_view full_text, Language language);

struct LooseVariant {
  std::string id;
  std::string text;
};

/// The eight transforms tried by loose evaluation, in fixed order:
/// identity, strip-asterisks, drop-first-line, drop-last-line,
/// drop-first-last-lines, then the asterisk-stripped forms of the three
/// line removals.
std::vector<LooseVariant> loose_variants(std::string_view full_text);

inline constexpr std::string_view kLooseVariantIds[] = {
    "identity",
    "strip-asterisks",
    "drop-first-line",
    "drop-last-line",
    "drop-first-last-lines",
    "strip-asterisks+drop-first-line",
    "strip-asterisks+drop-last-line",
    "strip-asterisks+drop-first-last-lines",
};

/// Rules must be valid (InvalidRule otherwise). With `strict_only`, loose
/// evaluation is skipped and loose_pass mirrors strict_pass.
Verdict verify_instruction(const Instruction& instruction, std::string_view response,
                           bool strict_only = false);

}  // namespace lexeval
