#include "lexeval/dsl.hpp"

#include <cctype>
#include <charconv>
#include <limits>

namespace lexeval::dsl {

ParseError::ParseError(Kind kind, std::size_t position, std::vector<std::string> expected,
                       const std::string& message)
    : std::runtime_error("at " + std::to_string(position) + ": " + message),
      kind_(kind),
      position_(position),
      expected_(std::move(expected)) {}

namespace {

bool is_lower(char c) { return c >= 'a' && c <= 'z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src) {}

  Rule parse() {
    Rule rule;
    skip_ws();
    rule.procedure.push_back(step());
    for (;;) {
      skip_ws();
      if (peek() != '.') break;
      ++pos_;
      skip_ws();
      rule.procedure.push_back(step());
    }
    skip_ws();
    rule.relation = relation();
    skip_ws();
    rule.value = value();
    skip_ws();
    if (pos_ != src_.size()) fail({"end of input"}, "trailing input");
    return rule;
  }

 private:
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(std::vector<std::string> expected, const std::string& what) const {
    std::string msg = what + "; expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) msg += " | ";
      msg += expected[i];
    }
    throw ParseError(ParseError::Kind::kSyntax, pos_, std::move(expected), msg);
  }

  std::string_view identifier() {
    const std::size_t start = pos_;
    while (is_lower(peek())) ++pos_;
    return src_.substr(start, pos_ - start);
  }

  // Optional leading '-', then digits.
  bool integer(long long& out) {
    const std::size_t start = pos_;
    if (peek() == '-') ++pos_;
    if (!is_digit(peek())) {
      pos_ = start;
      return false;
    }
    while (is_digit(peek())) ++pos_;
    const char* first = src_.data() + start;
    const char* last = src_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc{} || ptr != last) {
      pos_ = start;
      fail({"integer"}, "integer out of range");
    }
    return true;
  }

  int ordinal(bool allow_last) {
    const std::size_t start = pos_;
    long long n = 0;
    if (!integer(n)) fail({allow_last ? "positive integer or -1" : "positive integer"}, "missing integer");
    const bool ok = n >= 1 || (allow_last && n == -1);
    if (!ok || n > std::numeric_limits<int>::max()) {
      pos_ = start;
      fail({allow_last ? "positive integer or -1" : "positive integer"}, "index out of domain");
    }
    return static_cast<int>(n);
  }

  ProcedureStep step() {
    ProcedureStep s;
    const std::size_t start = pos_;
    const std::string_view name = identifier();
    const auto level = parse_level(name);
    if (!level) {
      pos_ = start;
      fail({"level name"}, name.empty() ? "missing level" : "unknown level '" + std::string(name) + "'");
    }
    s.level = *level;
    if (s.level == Level::kPattern) {
      skip_ws();
      if (src_.substr(pos_, 2) != "(/") fail({"\"(/\""}, "pattern needs a /regex/ body");
      pos_ += 2;
      const std::size_t body_start = pos_;
      const std::size_t end = src_.find("/)", pos_);
      if (end == std::string_view::npos) {
        pos_ = src_.size();
        fail({"\"/)\""}, "unterminated pattern");
      }
      s.pattern = std::string(src_.substr(body_start, end - body_start));
      try {
        compile_pattern(*s.pattern);
      } catch (const std::regex_error& e) {
        throw ParseError(ParseError::Kind::kPattern, body_start, {"regular expression"},
                         std::string("invalid pattern: ") + e.what());
      }
      pos_ = end + 2;
    }
    skip_ws();
    s.predicate = predicate();
    return s;
  }

  Predicate predicate() {
    switch (peek()) {
      case '@':
        ++pos_;
        if (is_digit(peek()) || peek() == '-') return Predicate::index(ordinal(true));
        return Predicate::all();
      case '!':
        if (peek(1) == '=') return Predicate::all();  // relation "!="
        ++pos_;
        return Predicate::before(ordinal(false));
      case '$':
        ++pos_;
        return Predicate::after(ordinal(false));
      case '%':
        ++pos_;
        return Predicate::between();
      case '#':
        ++pos_;
        return Predicate::count();
      default:
        return Predicate::all();
    }
  }

  Relation relation() {
    const std::size_t start = pos_;
    std::string_view token;
    if (is_lower(peek())) {
      token = identifier();
    } else {
      std::size_t len = 0;
      const char c = peek();
      if (c == '=' || c == '>' || c == '<') {
        len = peek(1) == '=' && c != '=' ? 2 : 1;
      } else if (c == '!' && peek(1) == '=') {
        len = 2;
      }
      token = src_.substr(pos_, len);
      pos_ += len;
    }
    const auto rel = parse_relation(token);
    if (!rel || token.empty()) {
      pos_ = start;
      fail({"\"=\"", "\"!=\"", "\">\"", "\">=\"", "\"<\"", "\"<=\"", "textual relation name"},
           token.empty() ? "missing relation" : "unknown relation '" + std::string(token) + "'");
    }
    return *rel;
  }

  Value value() {
    if (peek() == '"') return quoted();
    long long n = 0;
    if (!integer(n)) fail({"integer", "quoted string"}, "missing value");
    return static_cast<std::int64_t>(n);
  }

  std::string quoted() {
    ++pos_;  // opening quote
    std::string out;
    for (;;) {
      if (pos_ >= src_.size()) fail({"'\"'"}, "unterminated string");
      const char c = src_[pos_];
      if (c == '"') {
        ++pos_;
        return out;
      }
      if (c == '\\') {
        const char e = peek(1);
        if (e == '"' || e == '\\') {
          out.push_back(e);
        } else if (e == 'n') {
          out.push_back('\n');
        } else {
          ++pos_;
          fail({"\\\"", "\\\\", "\\n"}, "unknown escape");
        }
        pos_ += 2;
        continue;
      }
      out.push_back(c);
      ++pos_;
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

void append_step(std::string& out, const ProcedureStep& step) {
  if (step.level == Level::kPattern) {
    out += "pattern(/";
    out += step.pattern.value_or("");
    out += "/)";
  } else {
    out += to_string(step.level);
  }
  const Predicate& p = step.predicate;
  switch (p.kind) {
    case PredicateKind::kIndex:
      out += '@';
      out += std::to_string(p.n);
      break;
    case PredicateKind::kAll:
      if (step.level != Level::kAnswer) out += '@';
      break;
    case PredicateKind::kBefore:
      out += '!';
      out += std::to_string(p.n);
      break;
    case PredicateKind::kAfter:
      out += '$';
      out += std::to_string(p.n);
      break;
    case PredicateKind::kBetween:
      out += '%';
      break;
    case PredicateKind::kCount:
      out += '#';
      break;
  }
}

}  // namespace

Rule parse_rule(std::string_view source) {
  Rule rule = Parser(source).parse();
  require_valid(rule);
  return rule;
}

std::string quote(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      default:
        out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

std::string format_rule(const Rule& rule) {
  std::string out;
  for (std::size_t i = 0; i < rule.procedure.size(); ++i) {
    if (i) out.push_back('.');
    append_step(out, rule.procedure[i]);
  }
  out.push_back(' ');
  out += relation_symbol(rule.relation);
  out.push_back(' ');
  if (const auto* n = std::get_if<std::int64_t>(&rule.value)) {
    out += std::to_string(*n);
  } else {
    out += quote(std::get<std::string>(rule.value));
  }
  return out;
}

}  // namespace lexeval::dsl
