#pragma once

// One-line rule syntax.
//
//   rule      := procedure relation value
//   procedure := step ("." step)*
//   step      := level [pred] | "pattern(/" body "/)" [pred]
//   pred      := "@" int | "@" | "!" int | "$" int | "%" | "#"
//   relation  := "=" | "!=" | ">" | ">=" | "<" | "<=" | eq | neq | gt | gte | lt | lte
//              | startswith | endswith | equal | contain
//              | notstartswith | notendswith | notcontain
//   value     := int | '"' escaped '"'      (escapes: \" \\ \n)
//
// Whitespace between tokens is ignored. A step without a predicate selects
// all elements. "@" accepts only positive integers or -1. A pattern body ends
// at the first "/)".
//
// Examples:
//   sentence# = 5
//   paragraph@2.sentence@-1 endswith "."
//   pattern(/[0-9]+/)# >= 3

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lexeval/rule.hpp"

namespace lexeval::dsl {

class ParseError : public std::runtime_error {
 public:
  enum class Kind { kSyntax, kPattern };

  ParseError(Kind kind, std::size_t position, std::vector<std::string> expected,
             const std::string& message);

  Kind kind() const { return kind_; }
  /// Byte offset into the source.
  std::size_t position() const { return position_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  Kind kind_;
  std::size_t position_;
  std::vector<std::string> expected_;
};

/// Throws ParseError on syntax or pattern errors, InvalidRule when the parsed
/// rule fails check_validity.
Rule parse_rule(std::string_view source);

/// Canonical form: no redundant whitespace, numerical relations as symbols,
/// string values double-quoted and escaped.
std::string format_rule(const Rule& rule);

std::string quote(std::string_view text);

}  // namespace lexeval::dsl
