#include "lexeval/generator.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

#include <fmt/format.h>

#include "lexeval/dsl.hpp"
#include "lexeval/unicode.hpp"

namespace lexeval {

namespace {

struct Weighted {
  PredicateKind kind;
  int weight;
};

constexpr Weighted kTerminalWeights[] = {
    {PredicateKind::kCount, 40},  {PredicateKind::kIndex, 28},  {PredicateKind::kAll, 12},
    {PredicateKind::kBefore, 6},  {PredicateKind::kAfter, 6},   {PredicateKind::kBetween, 8},
};

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& items) {
  return items[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(items.size()) - 1))];
}

const std::string& pick_text(Rng& rng, const std::vector<std::string>& items, const char* what) {
  if (items.empty()) throw GenerationError(fmt::format("lexicon exhausted: no {} entries", what));
  return pick(rng, items);
}

PredicateKind pick_terminal_kind(Rng& rng) {
  int total = 0;
  for (const auto& w : kTerminalWeights) total += w.weight;
  auto roll = uniform_int(rng, 0, total - 1);
  for (const auto& w : kTerminalWeights) {
    if (roll < w.weight) return w.kind;
    roll -= w.weight;
  }
  return PredicateKind::kCount;
}

bool level_in_language(Level level, Language language) {
  if (language == Language::kZh) return level != Level::kWord && level != Level::kLetter;
  return level != Level::kCharacter;
}

std::vector<Level> terminal_levels(PredicateKind kind, Language language) {
  std::vector<Level> candidates;
  switch (kind) {
    case PredicateKind::kCount:
    case PredicateKind::kIndex:
      candidates = {Level::kParagraph, Level::kLine,   Level::kBullet,    Level::kSentence,
                    Level::kWord,      Level::kLetter, Level::kCharacter, Level::kPunc,
                    Level::kPattern};
      break;
    case PredicateKind::kAll:
      candidates = {Level::kParagraph, Level::kLine, Level::kBullet, Level::kSentence, Level::kWord,
                    Level::kPattern};
      break;
    case PredicateKind::kBefore:
    case PredicateKind::kAfter:
      candidates = {Level::kParagraph, Level::kLine, Level::kBullet, Level::kSentence, Level::kWord};
      break;
    case PredicateKind::kBetween:
      candidates = {Level::kParagraph, Level::kLine, Level::kBullet};
      if (language == Language::kEn) {
        candidates.push_back(Level::kSentence);
        candidates.push_back(Level::kWord);
      }
      break;
  }
  std::erase_if(candidates, [&](Level l) { return !level_in_language(l, language); });
  return candidates;
}

std::vector<Level> levels_at_tier(int tier, Language language) {
  std::vector<Level> out;
  for (Level l : kAllLevels) {
    if (l == Level::kAnswer || l == Level::kPattern || !level_in_language(l, language)) continue;
    if (level_tier(l) == tier) out.push_back(l);
  }
  return out;
}

Predicate ancestor_predicate(Rng& rng) {
  const auto roll = uniform_int(rng, 0, 99);
  if (roll < 70) return Predicate::index(static_cast<int>(uniform_int(rng, 1, 3)));
  if (roll < 85) return Predicate::index(-1);
  return Predicate::all();
}

Predicate terminal_predicate(Rng& rng, PredicateKind kind) {
  switch (kind) {
    case PredicateKind::kIndex:
      return uniform_int(rng, 0, 4) == 0 ? Predicate::index(-1)
                                         : Predicate::index(static_cast<int>(uniform_int(rng, 1, 3)));
    case PredicateKind::kAll:
      return Predicate::all();
    case PredicateKind::kBefore:
      return Predicate::before(static_cast<int>(uniform_int(rng, 2, 4)));
    case PredicateKind::kAfter:
      return Predicate::after(static_cast<int>(uniform_int(rng, 1, 3)));
    case PredicateKind::kBetween:
      return Predicate::between();
    case PredicateKind::kCount:
      return Predicate::count();
  }
  return Predicate::all();
}

struct CountRange {
  int lo;
  int hi;
};

// Plausible count targets given the terminal level and the tier of the
// innermost ancestor (0 when counting over the whole response).
CountRange count_range(Level level, int parent_tier) {
  switch (level) {
    case Level::kParagraph:
      return {1, 6};
    case Level::kLine:
      return parent_tier == 0 ? CountRange{2, 12} : CountRange{1, 5};
    case Level::kBullet:
      return parent_tier == 0 ? CountRange{2, 8} : CountRange{1, 5};
    case Level::kSentence:
      return parent_tier == 0 ? CountRange{2, 12} : CountRange{1, 5};
    case Level::kWord:
      if (parent_tier == 0) return {20, 200};
      return parent_tier == 1 ? CountRange{10, 80} : CountRange{3, 25};
    case Level::kCharacter:
      if (parent_tier == 0) return {50, 300};
      return parent_tier == 1 ? CountRange{20, 120} : CountRange{5, 40};
    case Level::kLetter:
      if (parent_tier == 0) return {100, 800};
      if (parent_tier == 1) return {40, 300};
      return parent_tier <= 3 ? CountRange{10, 120} : CountRange{2, 10};
    case Level::kPunc:
      if (parent_tier == 0) return {1, 25};
      if (parent_tier == 1) return {1, 8};
      return parent_tier <= 3 ? CountRange{1, 4} : CountRange{0, 2};
    case Level::kPattern:
      return parent_tier == 0 ? CountRange{1, 6} : CountRange{0, 3};
    case Level::kAnswer:
      break;
  }
  return {1, 1};
}

std::vector<Relation> relations_for(PredicateKind kind, Level level) {
  std::vector<Relation> out;
  if (kind == PredicateKind::kCount) {
    out.assign(std::begin(kNumericalRelations), std::end(kNumericalRelations));
    return out;
  }
  const bool single = level == Level::kLetter || level == Level::kCharacter || level == Level::kPunc;
  for (Relation r : kTextualRelations) {
    if (!relation_allowed(kind, r)) continue;
    if (single && r != Relation::kEqual && r != Relation::kNotContain) continue;
    out.push_back(r);
  }
  return out;
}

std::string gap_value(Level level) {
  switch (level) {
    case Level::kParagraph:
      return "\n\n";
    case Level::kLine:
    case Level::kBullet:
      return "\n";
    default:
      return " ";
  }
}

std::string text_value(const GenConfig& config, Rng& rng, PredicateKind kind, Level level,
                       Relation relation) {
  const Lexicon& lex = config.lexicon;
  const bool zh = config.language == Language::kZh;
  if (kind == PredicateKind::kBetween) return gap_value(level);
  switch (level) {
    case Level::kLetter:
      return pick_text(rng, lex.letters, "letter");
    case Level::kCharacter:
      return pick_text(rng, lex.characters, "character");
    case Level::kPunc:
      return pick_text(rng, lex.punctuation, "punctuation");
    default:
      break;
  }
  if (kind == PredicateKind::kBefore || kind == PredicateKind::kAfter) {
    if (relation == Relation::kEqual) return pick_text(rng, lex.phrases, "phrase");
    return pick_text(rng, lex.words, "word");
  }
  const bool prefix = relation == Relation::kStartsWith || relation == Relation::kNotStartsWith;
  const bool suffix = relation == Relation::kEndsWith || relation == Relation::kNotEndsWith;
  if (level == Level::kWord || level == Level::kPattern) {
    if ((prefix || suffix) && !zh) return pick_text(rng, lex.letters, "letter");
    if (zh) return pick_text(rng, lex.characters, "character");
    return pick_text(rng, lex.words, "word");
  }
  if (suffix) return pick_text(rng, lex.endings, "ending");
  if (prefix) {
    if (zh) return pick_text(rng, lex.characters, "character");
    return pick_text(rng, lex.words, "word");
  }
  if (relation == Relation::kEqual) return pick_text(rng, lex.phrases, "phrase");
  return uniform_int(rng, 0, 2) == 0 ? pick_text(rng, lex.phrases, "phrase")
                                     : pick_text(rng, lex.words, "word");
}

// "Word@1 startswith T" reads better with an upper-case letter.
std::string capitalize_ascii(std::string s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

std::string procedure_key(const Rule& rule) {
  Rule probe = rule;
  probe.relation = is_numerical(rule.relation) ? Relation::kEq : Relation::kContain;
  probe.value = is_numerical(rule.relation) ? Value{std::int64_t{0}} : Value{std::string("x")};
  return dsl::format_rule(probe);
}

bool text_holds(const std::string& text, Relation relation, const std::string& value) {
  const bool starts = text.rfind(value, 0) == 0;
  const bool ends = text.size() >= value.size() &&
                    text.compare(text.size() - value.size(), value.size(), value) == 0;
  const bool contains = text.find(value) != std::string::npos;
  switch (relation) {
    case Relation::kStartsWith:
      return starts;
    case Relation::kEndsWith:
      return ends;
    case Relation::kEqual:
      return text == value;
    case Relation::kContain:
      return contains;
    case Relation::kNotStartsWith:
      return !starts;
    case Relation::kNotEndsWith:
      return !ends;
    case Relation::kNotContain:
      return !contains;
    default:
      return true;
  }
}

// FNV-1a followed by the splitmix64 finalizer, so ids of neighbouring
// indices do not share prefixes.
std::uint64_t hash_id(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  h ^= h >> 30;
  h *= 0xbf58476d1ce4e5b9ULL;
  h ^= h >> 27;
  h *= 0x94d049bb133111ebULL;
  h ^= h >> 31;
  return h;
}

}  // namespace

std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  if (hi <= lo) return lo;
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(rng());
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return lo + static_cast<std::int64_t>(x % span);
}

Lexicon Lexicon::builtin(Language language) {
  Lexicon lex;
  if (language == Language::kEn) {
    lex.words = {"the",     "data",   "model",  "river",   "light",  "green",   "simple",
                 "answer",  "travel", "music",  "garden",  "future", "system",  "ocean",
                 "history", "coffee", "winter", "city",    "science", "friend", "journey",
                 "moment",  "energy", "bridge", "morning", "story",  "quiet",   "planet"};
    lex.phrases = {"In conclusion",      "for example",    "on the other hand", "as a result",
                   "Thank you for reading", "in other words", "at the same time", "To sum up",
                   "first of all",       "step by step"};
    lex.letters = {"A", "B", "C", "D", "E", "F", "G", "H", "I", "L", "M", "N", "O", "P", "R", "S", "T", "W",
                   "a", "e", "i", "o", "s", "t"};
    lex.punctuation = {",", ".", "!", "?", ";", ":", "-", "("};
    lex.endings = {".", "!", "?", ":", "...", "end."};
    lex.patterns = {"[0-9]+", "[A-Z][a-z]+", "\\b[a-z]{7,}\\b", "\\([^)]*\\)", "[A-Z]{2,}", "\\b[Tt]he\\b"};
    lex.characters = {};
  } else {
    lex.words = {"我们", "时间", "城市", "音乐", "科学", "朋友", "未来", "历史", "自然",
                 "生活", "学习", "文化", "技术", "世界", "春天", "问题", "发展", "重要"};
    lex.phrases = {"总而言之", "例如", "另一方面", "因此", "谢谢阅读", "首先", "换句话说", "与此同时"};
    lex.characters = {"的", "我", "是", "人", "天", "大", "山", "水", "花", "月",
                      "中", "心", "学", "好", "书", "风", "春", "光", "家", "梦"};
    lex.punctuation = {"，", "。", "！", "？", "；", "：", "、"};
    lex.endings = {"。", "！", "？", "…", "吗？", "了。"};
    lex.patterns = {"[0-9]+", "[A-Za-z]+", "《[^》]+》", "“[^”]+”"};
    lex.letters = {};
  }
  return lex;
}

GenConfig GenConfig::defaults(Language language) {
  GenConfig config;
  config.language = language;
  config.lexicon = Lexicon::builtin(language);
  if (language == Language::kEn) {
    config.seed_tasks = {
        "Write a short story about a lighthouse keeper.",
        "Explain how photosynthesis works to a ten-year-old.",
        "Describe your ideal weekend.",
        "Write a product description for a reusable water bottle.",
        "Give advice to someone who is starting to learn programming.",
        "Summarize the benefits of regular exercise.",
        "Write a letter to a friend you have not seen in years.",
        "Describe a city you would like to visit.",
    };
  } else {
    config.seed_tasks = {
        "写一篇关于秋天的短文。",           "介绍一下你最喜欢的一本书。",
        "解释一下为什么要保护环境。",       "给正在准备考试的同学写一些建议。",
        "描述一次难忘的旅行经历。",         "谈谈人工智能对日常生活的影响。",
        "写一段介绍家乡美食的文字。",       "说明如何养成良好的阅读习惯。",
    };
  }
  return config;
}

void GenConfig::validate() const {
  if (max_depth < 1 || max_depth > 4) throw std::invalid_argument("max_depth must be in 1..4");
  if (max_constraints < 1 || max_constraints > 5) {
    throw std::invalid_argument("max_constraints must be in 1..5");
  }
  for (int c : counts) {
    if (c < 0) throw std::invalid_argument("bucket counts must be non-negative");
  }
  if (seed_tasks.empty()) throw std::invalid_argument("at least one seed task is required");
  for (const auto& p : lexicon.patterns) {
    try {
      compile_pattern(p);
    } catch (const std::regex_error&) {
      throw std::invalid_argument("lexicon pattern does not compile: " + p);
    }
    if (p.empty() || p.find("/)") != std::string::npos) {
      throw std::invalid_argument("lexicon pattern is not encodable: " + p);
    }
  }
}

double constraint_score(const Rule& rule) {
  double depth = static_cast<double>(rule.procedure.size()) - 1.0;
  double predicate = 0;
  bool has_pattern = false;
  for (const ProcedureStep& step : rule.procedure) {
    has_pattern = has_pattern || step.level == Level::kPattern;
    switch (step.predicate.kind) {
      case PredicateKind::kIndex:
        predicate += step.predicate.n == -1 ? 1 : 0;
        break;
      case PredicateKind::kAll:
      case PredicateKind::kBefore:
      case PredicateKind::kAfter:
      case PredicateKind::kCount:
        predicate += 1;
        break;
      case PredicateKind::kBetween:
        predicate += 2;
        break;
    }
  }
  double relation = 0;
  switch (rule.relation) {
    case Relation::kContain:
    case Relation::kNotContain:
    case Relation::kGt:
    case Relation::kGte:
    case Relation::kLt:
    case Relation::kLte:
      relation = 0;
      break;
    case Relation::kStartsWith:
    case Relation::kEndsWith:
    case Relation::kNotStartsWith:
    case Relation::kNotEndsWith:
    case Relation::kEq:
    case Relation::kNeq:
      relation = 1;
      break;
    case Relation::kEqual:
      relation = 2;
      break;
  }
  double value = 0;
  if (const auto* text = std::get_if<std::string>(&rule.value)) {
    const std::size_t len = unicode::length(*text);
    value = len <= 1 ? 0 : (len <= 5 ? 1 : 2);
  }
  if (has_pattern) value += 1;
  return depth + predicate + relation + value;
}

DifficultyScore grade_difficulty(const std::vector<Rule>& rules) {
  DifficultyScore score;
  double sum = 0;
  for (const Rule& rule : rules) {
    score.per_constraint.push_back(constraint_score(rule));
    sum += score.per_constraint.back();
  }
  const double count = rules.empty() ? 1.0 : static_cast<double>(rules.size());
  score.multiplier = 1.0 + 0.25 * (count - 1.0);
  score.total = sum * score.multiplier;
  if (score.total <= 2.0) {
    score.grade = Difficulty::kEasy;
  } else if (score.total <= 5.0) {
    score.grade = Difficulty::kMedium;
  } else {
    score.grade = Difficulty::kHard;
  }
  return score;
}

Rule sample_rule(const GenConfig& config, Rng& rng) {
  const Language lang = config.language;
  const PredicateKind kind = pick_terminal_kind(rng);

  // A third of "all" draws become a whole-response check.
  if (kind == PredicateKind::kAll && uniform_int(rng, 0, 2) == 0) {
    static const std::vector<Relation> kAnswerRelations = {
        Relation::kContain, Relation::kNotContain, Relation::kStartsWith, Relation::kEndsWith};
    Rule rule;
    rule.procedure.push_back({Level::kAnswer, Predicate::all(), std::nullopt});
    rule.relation = pick(rng, kAnswerRelations);
    rule.value = text_value(config, rng, kind, Level::kAnswer, rule.relation);
    return rule;
  }

  std::vector<Level> levels = terminal_levels(kind, lang);
  if (config.lexicon.patterns.empty()) std::erase(levels, Level::kPattern);
  const Level level = pick(rng, levels);
  const int terminal_tier = level == Level::kPattern ? 4 : *level_tier(level);

  std::vector<int> tiers;
  for (int t = 1; t < terminal_tier; ++t) {
    if (!levels_at_tier(t, lang).empty()) tiers.push_back(t);
  }
  const auto wanted = uniform_int(rng, 1, config.max_depth) - 1;
  const auto ancestors = std::min<std::int64_t>(wanted, static_cast<std::int64_t>(tiers.size()));
  // Partial Fisher-Yates over the candidate tiers.
  for (std::int64_t i = 0; i < ancestors; ++i) {
    const auto j = uniform_int(rng, i, static_cast<std::int64_t>(tiers.size()) - 1);
    std::swap(tiers[static_cast<std::size_t>(i)], tiers[static_cast<std::size_t>(j)]);
  }
  tiers.resize(static_cast<std::size_t>(ancestors));
  std::sort(tiers.begin(), tiers.end());

  Rule rule;
  for (int t : tiers) {
    rule.procedure.push_back({pick(rng, levels_at_tier(t, lang)), ancestor_predicate(rng), std::nullopt});
  }
  ProcedureStep terminal{level, terminal_predicate(rng, kind), std::nullopt};
  if (level == Level::kPattern) terminal.pattern = pick_text(rng, config.lexicon.patterns, "pattern");
  rule.procedure.push_back(terminal);

  rule.relation = pick(rng, relations_for(kind, level));
  if (kind == PredicateKind::kCount) {
    const int parent_tier = tiers.empty() ? 0 : tiers.back();
    const CountRange range = count_range(level, parent_tier);
    std::int64_t n = uniform_int(rng, range.lo, range.hi);
    if (rule.relation == Relation::kLt && n == 0) n = 1;
    rule.value = n;
  } else {
    std::string text = text_value(config, rng, kind, level, rule.relation);
    if (level == Level::kWord && rule.relation == Relation::kStartsWith) text = capitalize_ascii(text);
    rule.value = std::move(text);
  }
  return rule;
}

bool rules_compatible(const std::vector<Rule>& rules) {
  std::map<std::string, std::vector<const Rule*>> groups;
  for (const Rule& r : rules) groups[procedure_key(r)].push_back(&r);

  for (const auto& [key, group] : groups) {
    for (std::size_t i = 0; i < group.size(); ++i) {
      for (std::size_t j = i + 1; j < group.size(); ++j) {
        if (*group[i] == *group[j]) return false;
      }
    }
    if (group.front()->counts()) {
      std::int64_t lo = 0;
      std::int64_t hi = std::numeric_limits<std::int64_t>::max();
      std::set<std::int64_t> excluded;
      for (const Rule* r : group) {
        const auto v = std::get<std::int64_t>(r->value);
        switch (r->relation) {
          case Relation::kEq:
            lo = std::max(lo, v);
            hi = std::min(hi, v);
            break;
          case Relation::kNeq:
            excluded.insert(v);
            break;
          case Relation::kGt:
            lo = std::max(lo, v + 1);
            break;
          case Relation::kGte:
            lo = std::max(lo, v);
            break;
          case Relation::kLt:
            hi = std::min(hi, v - 1);
            break;
          case Relation::kLte:
            hi = std::min(hi, v);
            break;
          default:
            break;
        }
      }
      if (lo > hi) return false;
      if (lo == hi && excluded.count(lo)) return false;
      continue;
    }

    for (const Rule* a : group) {
      const auto& av = std::get<std::string>(a->value);
      for (const Rule* b : group) {
        if (a == b) continue;
        const auto& bv = std::get<std::string>(b->value);
        if (a->relation == Relation::kEqual && !text_holds(av, b->relation, bv)) return false;
        // a implies a string property that b forbids.
        const bool a_has = text_holds(av, Relation::kContain, bv);
        if (a->relation == Relation::kContain && b->relation == Relation::kNotContain && a_has) {
          return false;
        }
        if (a->relation == Relation::kStartsWith && b->relation == Relation::kNotStartsWith &&
            text_holds(av, Relation::kStartsWith, bv)) {
          return false;
        }
        if (a->relation == Relation::kEndsWith && b->relation == Relation::kNotEndsWith &&
            text_holds(av, Relation::kEndsWith, bv)) {
          return false;
        }
        if ((a->relation == Relation::kStartsWith || a->relation == Relation::kEndsWith) &&
            b->relation == Relation::kNotContain && a_has) {
          return false;
        }
        if (a->relation == Relation::kStartsWith && b->relation == Relation::kStartsWith &&
            !text_holds(av, Relation::kStartsWith, bv) && !text_holds(bv, Relation::kStartsWith, av)) {
          return false;
        }
        if (a->relation == Relation::kEndsWith && b->relation == Relation::kEndsWith &&
            !text_holds(av, Relation::kEndsWith, bv) && !text_holds(bv, Relation::kEndsWith, av)) {
          return false;
        }
      }
    }
  }
  return true;
}

std::string instruction_id(std::uint64_t seed, Language language, std::size_t index) {
  const auto h = hash_id(fmt::format("lexeval:{}:{}:{}", seed, to_string(language), index));
  return fmt::format("{}-{:016x}", to_string(language), h);
}

std::string rule_multiset_key(const std::vector<Rule>& rules) {
  std::vector<std::string> parts;
  parts.reserve(rules.size());
  for (const Rule& r : rules) parts.push_back(dsl::format_rule(r));
  std::sort(parts.begin(), parts.end());
  std::string key;
  for (const auto& p : parts) {
    key += p;
    key.push_back('\x1f');
  }
  return key;
}

std::vector<Instruction> generate_dataset(const GenConfig& config, const TemplateSet& templates,
                                          const ScreenFn& screen) {
  config.validate();
  const auto seed = config.seed;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(config.language == Language::kEn ? 0x656e : 0x7a68)};
  Rng rng(seq);

  std::array<int, 3> filled{0, 0, 0};
  const auto done = [&] {
    for (std::size_t b = 0; b < 3; ++b) {
      if (filled[b] < config.counts[b]) return false;
    }
    return true;
  };

  std::vector<Instruction> out;
  std::set<std::string> seen;
  int failures = 0;
  while (!done()) {
    if (failures >= kAttemptsPerSlot) {
      std::array<int, 3> shortfall{};
      for (std::size_t b = 0; b < 3; ++b) shortfall[b] = config.counts[b] - filled[b];
      throw BucketUnfillable(
          shortfall, fmt::format("bucket unfillable after {} attempts; short by easy={} medium={} hard={}",
                                 kAttemptsPerSlot, shortfall[0], shortfall[1], shortfall[2]));
    }
    ++failures;

    const auto count = uniform_int(rng, 1, config.max_constraints);
    std::vector<Rule> rules;
    for (std::int64_t i = 0; i < count; ++i) rules.push_back(sample_rule(config, rng));
    const auto& task = pick(rng, config.seed_tasks);

    if (!rules_compatible(rules)) continue;
    const DifficultyScore score = grade_difficulty(rules);
    const auto bucket = static_cast<std::size_t>(score.grade);
    if (filled[bucket] >= config.counts[bucket]) continue;
    std::string key = rule_multiset_key(rules);
    if (seen.count(key)) continue;

    Instruction instr;
    instr.id = instruction_id(seed, config.language, out.size());
    instr.language = config.language;
    instr.prompt = render_prompt(rules, config.language, task, templates);
    instr.difficulty = score.grade;
    instr.depth = instruction_depth(rules);
    instr.count = static_cast<int>(rules.size());
    instr.rules = std::move(rules);
    if (screen && !screen(instr)) continue;

    seen.insert(std::move(key));
    ++filled[bucket];
    out.push_back(std::move(instr));
    failures = 0;
  }
  return out;
}

}  // namespace lexeval
