#include "fixtures.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "../oracle/oracle.hpp"

namespace fixtures {

using lexeval::Level;
using lexeval::Predicate;
using lexeval::PredicateKind;
using lexeval::ProcedureStep;
using lexeval::Relation;
using lexeval::uniform_int;

namespace {

template <typename T, std::size_t N>
const T& any(Rng& rng, const T (&items)[N]) {
  return items[static_cast<std::size_t>(uniform_int(rng, 0, N - 1))];
}

bool chance(Rng& rng, int percent) { return uniform_int(rng, 0, 99) < percent; }

std::string encode(const std::u32string& s) {
  std::string out;
  for (char32_t c : s) {
    if (c < 0x80) {
      out += static_cast<char>(c);
    } else if (c < 0x800) {
      out += static_cast<char>(0xC0 | (c >> 6));
      out += static_cast<char>(0x80 | (c & 0x3F));
    } else if (c < 0x10000) {
      out += static_cast<char>(0xE0 | (c >> 12));
      out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (c & 0x3F));
    } else {
      out += static_cast<char>(0xF0 | (c >> 18));
      out += static_cast<char>(0x80 | ((c >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((c >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (c & 0x3F));
    }
  }
  return out;
}

const char* const kEnWords[] = {"the",   "data",  "model",   "river", "light",  "green", "simple",
                                "answer", "city", "science", "a",     "of",     "to",    "and",
                                "Dr.",   "e.g.",  "etc.",    "Mr.",   "vs.",    "2024",  "42",
                                "x",     "I",     "garden",  "story", "(note)", "\"hi\"", "well,",
                                "it's",  "AI",    "NASA",    "a.m.",  "3.14",   "+",     "—"};
const char* const kZhWords[] = {"我们", "时间", "城市", "音乐", "科学", "的", "是",   "春天",
                                "学习", "AI",   "2024", "《书》", "“你好”", "问题", "发展", "人"};
const char* const kEnEnds[] = {".", ".", ".", "!", "?", "...", "?!", "", ":", "."};
const char* const kZhEnds[] = {"。", "。", "！", "？", "……", "", "；", "。"};
const char* const kBullets[] = {"- ", "* ", "+ ", "1. ", "2) ", "10. ", "-", "  - ", "\t* "};
const char* const kParaBreaks[] = {"\n\n", "\n\n", "\r\n\r\n", "\n\n\n", "\n \n", "\n\r\n"};
const char* const kSpaces[] = {" ", " ", " ", "  ", "\t"};

std::string sentence(Rng& rng, Language lang) {
  std::string out;
  const auto n = uniform_int(rng, 1, 8);
  for (std::int64_t i = 0; i < n; ++i) {
    if (lang == Language::kEn) {
      std::string w = any(rng, kEnWords);
      if (i == 0 && chance(rng, 60) && w[0] >= 'a' && w[0] <= 'z') w[0] = static_cast<char>(w[0] - 32);
      if (i > 0) out += any(rng, kSpaces);
      if (chance(rng, 5)) w = "**" + w + "**";
      if (chance(rng, 8)) w += ",";
      out += w;
    } else {
      if (i > 0 && chance(rng, 10)) out += chance(rng, 50) ? " " : "　";
      out += any(rng, kZhWords);
      if (chance(rng, 15)) out += chance(rng, 50) ? "，" : "、";
    }
  }
  out += lang == Language::kEn ? any(rng, kEnEnds) : any(rng, kZhEnds);
  return out;
}

std::string line(Rng& rng, Language lang) {
  std::string out;
  if (chance(rng, 30)) out += any(rng, kBullets);
  const auto n = uniform_int(rng, 1, 3);
  for (std::int64_t i = 0; i < n; ++i) {
    if (i > 0) out += lang == Language::kEn ? " " : (chance(rng, 30) ? " " : "");
    out += sentence(rng, lang);
  }
  if (chance(rng, 5)) out += " ";
  return out;
}

}  // namespace

std::string synthetic_text(Rng& rng, Language lang, std::size_t max_code_points) {
  std::string text;
  if (chance(rng, 15)) text += lang == Language::kEn ? "Sure! Here is my answer:\n" : "好的，以下是回答：\n";
  if (chance(rng, 5)) text += "\n";
  const auto paras = uniform_int(rng, 1, 4);
  for (std::int64_t p = 0; p < paras; ++p) {
    if (p > 0) text += any(rng, kParaBreaks);
    const auto lines = uniform_int(rng, 1, 3);
    for (std::int64_t l = 0; l < lines; ++l) {
      if (l > 0) text += chance(rng, 10) ? "\r\n" : "\n";
      text += line(rng, lang);
    }
  }
  if (chance(rng, 10)) text += lang == Language::kEn ? "\nHope this helps!" : "\n希望对你有帮助！";
  if (chance(rng, 5)) text += "\n";
  if (chance(rng, 3)) text.clear();

  std::u32string cps = oracle::decode(text);
  if (cps.size() > max_code_points) cps.resize(max_code_points);
  return encode(cps);
}

// Every level is drawn for both languages; the engine must handle mismatches too.
Rule random_rule(Rng& rng, Language) {
  static const Level kTiered[] = {Level::kParagraph, Level::kLine,      Level::kBullet,
                                  Level::kSentence,  Level::kWord,      Level::kCharacter,
                                  Level::kLetter,    Level::kPunc};
  static const char* const kPatterns[] = {"[0-9]+", "[A-Z][a-z]+", "\\b[a-z]{5,}\\b", "[aeiou]{2}",
                                          "的",     "[。！？]",    "\\*\\*[^*]+\\*\\*", "^[A-Z]",
                                          "a|the",  "x?y",         "\\s+"};
  static const char* const kTexts[] = {"a",  "the", ".",  "。", "!", "The", "data", "我们", "\n",
                                       "\n\n", " ",  "e",  "I",  "，", "**", "of the", "2024"};
  for (;;) {
    const auto depth = uniform_int(rng, 1, 4);
    Rule rule;
    if (chance(rng, 15)) rule.procedure.push_back({Level::kAnswer, Predicate::all(), std::nullopt});
    std::vector<Level> levels;
    while (static_cast<std::int64_t>(levels.size()) < depth) levels.push_back(any(rng, kTiered));
    std::sort(levels.begin(), levels.end(),
              [](Level a, Level b) { return *lexeval::level_tier(a) < *lexeval::level_tier(b); });
    for (Level l : levels) rule.procedure.push_back({l, Predicate::all(), std::nullopt});
    if (chance(rng, 20)) {
      rule.procedure.back() = {Level::kPattern, Predicate::all(), std::string(any(rng, kPatterns))};
    }
    for (std::size_t i = 0; i < rule.procedure.size(); ++i) {
      auto& step = rule.procedure[i];
      if (step.level == Level::kAnswer) continue;
      const bool last = i + 1 == rule.procedure.size();
      switch (uniform_int(rng, 0, last ? 6 : 5)) {
        case 0:
        case 1:
          step.predicate = Predicate::index(chance(rng, 25) ? -1 : static_cast<int>(uniform_int(rng, 1, 4)));
          break;
        case 2:
          step.predicate = Predicate::all();
          break;
        case 3:
          step.predicate = Predicate::before(static_cast<int>(uniform_int(rng, 1, 4)));
          break;
        case 4:
          step.predicate = Predicate::after(static_cast<int>(uniform_int(rng, 1, 4)));
          break;
        case 5:
          step.predicate = Predicate::between();
          break;
        default:
          step.predicate = Predicate::count();
          break;
      }
    }
    if (rule.counts()) {
      rule.relation = any(rng, lexeval::kNumericalRelations);
      rule.value = uniform_int(rng, 0, 12);
    } else {
      rule.relation = any(rng, lexeval::kTextualRelations);
      rule.value = std::string(any(rng, kTexts));
    }
    if (lexeval::check_validity(rule).ok()) return rule;
  }
}

Rule tune_value(Rule rule, const std::string& text, Language lang, Rng& rng) {
  const std::u32string t = oracle::decode(text);
  oracle::Piece region{0, t.size()};
  const std::size_t selecting = rule.counts() ? rule.procedure.size() - 1 : rule.procedure.size();
  for (std::size_t k = 0; k < selecting; ++k) {
    const auto& step = rule.procedure[k];
    const auto pieces = oracle::split(t, region, step.level, lang, step.pattern.value_or(""));
    const int n = step.predicate.n;
    const int size = static_cast<int>(pieces.size());
    std::vector<oracle::Piece> options;
    switch (step.predicate.kind) {
      case PredicateKind::kIndex:
        if (n == -1 && size > 0) options.push_back(pieces.back());
        if (n >= 1 && n <= size) options.push_back(pieces[n - 1]);
        break;
      case PredicateKind::kAll:
        options = pieces;
        break;
      case PredicateKind::kBefore:
        if (n >= 1 && n <= size) options.push_back({region.start, pieces[n - 1].start});
        break;
      case PredicateKind::kAfter:
        if (n >= 1 && n <= size) options.push_back({pieces[n - 1].end, region.end});
        break;
      case PredicateKind::kBetween:
        for (int i = 1; i < size; ++i) options.push_back({pieces[i - 1].end, pieces[i].start});
        break;
      case PredicateKind::kCount:
        break;
    }
    if (options.empty()) return rule;
    region = options[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(options.size()) - 1))];
  }

  if (rule.counts()) {
    const auto& step = rule.terminal();
    const auto n = static_cast<std::int64_t>(
        oracle::split(t, region, step.level, lang, step.pattern.value_or("")).size());
    rule.value = std::max<std::int64_t>(0, n + uniform_int(rng, -1, 1));
    return rule;
  }
  const std::u32string piece = t.substr(region.start, region.end - region.start);
  if (piece.empty()) return rule;
  const auto len = static_cast<std::size_t>(uniform_int(rng, 1, std::min<std::int64_t>(6, piece.size())));
  std::u32string value;
  switch (rule.relation) {
    case Relation::kStartsWith:
    case Relation::kNotStartsWith:
      value = piece.substr(0, len);
      break;
    case Relation::kEndsWith:
    case Relation::kNotEndsWith:
      value = piece.substr(piece.size() - len);
      break;
    case Relation::kEqual:
      value = piece;
      break;
    default: {
      const auto start = static_cast<std::size_t>(uniform_int(rng, 0, piece.size() - len));
      value = piece.substr(start, len);
      break;
    }
  }
  rule.value = encode(value);
  return rule;
}

Rule case_rule(Rng& rng, Language lang, const std::string& text) {
  static const lexeval::GenConfig en = lexeval::GenConfig::defaults(Language::kEn);
  static const lexeval::GenConfig zh = lexeval::GenConfig::defaults(Language::kZh);
  Rule rule = chance(rng, 50) ? lexeval::sample_rule(lang == Language::kEn ? en : zh, rng)
                              : random_rule(rng, lang);
  if (chance(rng, 50)) rule = tune_value(std::move(rule), text, lang, rng);
  return rule;
}

std::vector<Rule> table_violations() {
  const auto textual = [](PredicateKind kind, Relation relation) {
    ProcedureStep step{Level::kSentence, Predicate{kind, 2}, std::nullopt};
    return Rule{{step}, relation, std::string("x")};
  };
  const auto numerical = [](PredicateKind kind, Relation relation) {
    ProcedureStep step{Level::kSentence, Predicate{kind, 2}, std::nullopt};
    return Rule{{step}, relation, std::int64_t{3}};
  };
  std::vector<Rule> out;
  for (Relation r : {Relation::kStartsWith, Relation::kEndsWith, Relation::kEqual, Relation::kNotStartsWith,
                     Relation::kNotEndsWith}) {
    out.push_back(textual(PredicateKind::kBefore, r));
  }
  for (Relation r : {Relation::kStartsWith, Relation::kEndsWith, Relation::kNotStartsWith, Relation::kNotEndsWith}) {
    out.push_back(textual(PredicateKind::kAfter, r));
  }
  for (Relation r : {Relation::kContain, Relation::kNotContain, Relation::kStartsWith, Relation::kEndsWith,
                     Relation::kNotStartsWith, Relation::kNotEndsWith}) {
    out.push_back(textual(PredicateKind::kBetween, r));
  }
  out.push_back(numerical(PredicateKind::kIndex, Relation::kGt));
  out.push_back(numerical(PredicateKind::kAll, Relation::kEq));
  out.push_back(numerical(PredicateKind::kBefore, Relation::kLt));
  out.push_back(textual(PredicateKind::kCount, Relation::kContain));
  out.push_back(textual(PredicateKind::kCount, Relation::kEqual));
  return out;
}

std::vector<lexeval::InstructionVerdict> random_verdicts(Rng& rng, std::size_t n) {
  std::vector<lexeval::InstructionVerdict> out;
  for (std::size_t i = 0; i < n; ++i) {
    lexeval::InstructionVerdict v;
    v.id = "id-" + std::to_string(i);
    v.language = chance(rng, 50) ? Language::kEn : Language::kZh;
    v.difficulty = static_cast<lexeval::Difficulty>(uniform_int(rng, 0, 2));
    v.depth = static_cast<int>(uniform_int(rng, 1, 4));
    v.count = static_cast<int>(uniform_int(rng, 1, 5));
    v.strict_pass = chance(rng, 40);
    v.loose_pass = v.strict_pass || chance(rng, 30);
    if (v.loose_pass) v.loose_variant = v.strict_pass ? "identity" : "drop-first-line";
    out.push_back(std::move(v));
  }
  return out;
}

TempDir::TempDir() {
  std::string templ = (std::filesystem::temp_directory_path() / "lexeval-test-XXXXXX").string();
  if (!mkdtemp(templ.data())) throw std::runtime_error("mkdtemp failed");
  root_ = templ;
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(root_, ec);
}

std::string TempDir::path(const std::string& name) const { return root_ + "/" + name; }

void TempDir::write(const std::string& name, const std::string& content) const {
  std::ofstream out(path(name), std::ios::binary);
  out << content;
}

std::string TempDir::read(const std::string& name) const {
  std::ifstream in(path(name), std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace fixtures
