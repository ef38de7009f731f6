#include "lexeval/render.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace lexeval {

namespace {

constexpr std::string_view kBuiltinTemplates =
#include "lexeval_default_templates.inc"
    ;

using Vars = std::map<std::string, std::string, std::less<>>;

// Single pass, so substituted text is never rescanned for placeholders.
std::string substitute(std::string_view tmpl, const Vars& vars) {
  std::string out;
  out.reserve(tmpl.size() + 32);
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const auto close = tmpl.find('}', i + 1);
      if (close != std::string_view::npos) {
        const auto name = tmpl.substr(i + 1, close - i - 1);
        if (auto it = vars.find(name); it != vars.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(tmpl[i]);
    ++i;
  }
  return out;
}

std::string english_ordinal(int n) {
  const int mod100 = n % 100;
  const char* suffix = "th";
  if (mod100 < 11 || mod100 > 13) {
    switch (n % 10) {
      case 1:
        suffix = "st";
        break;
      case 2:
        suffix = "nd";
        break;
      case 3:
        suffix = "rd";
        break;
      default:
        break;
    }
  }
  return std::to_string(n) + suffix;
}

std::string ordinal_word(const LanguageTemplates& t, int n) {
  if (n >= 1 && static_cast<std::size_t>(n) <= t.ordinals.size()) return t.ordinals[n - 1];
  return english_ordinal(n);
}

const std::string& lookup(const std::map<std::string, std::string>& m, const std::string& key) {
  auto it = m.find(key);
  if (it == m.end()) throw MissingTemplate("missing phrase '" + key + "'");
  return it->second;
}

std::string level_noun(const LanguageTemplates& t, const ProcedureStep& step, bool plural) {
  auto it = t.levels.find(std::string(to_string(step.level)));
  if (it == t.levels.end()) {
    throw MissingTemplate("missing level noun '" + std::string(to_string(step.level)) + "'");
  }
  const std::string& noun = plural ? it->second.second : it->second.first;
  return substitute(noun, Vars{{"pattern", step.pattern.value_or("")}});
}

std::string phrase(const LanguageTemplates& t, const ProcedureStep& step) {
  Vars vars{{"level", level_noun(t, step, false)},
            {"levels", level_noun(t, step, true)},
            {"n", std::to_string(step.predicate.n)},
            {"ordinal", ordinal_word(t, step.predicate.n)}};
  if (step.level == Level::kAnswer) return lookup(t.phrases, "answer");
  switch (step.predicate.kind) {
    case PredicateKind::kIndex:
      return substitute(lookup(t.phrases, step.predicate.n == -1 ? "last" : "index"), vars);
    case PredicateKind::kAll:
      return substitute(lookup(t.phrases, "all"), vars);
    case PredicateKind::kBefore:
      return substitute(lookup(t.phrases, "before"), vars);
    case PredicateKind::kAfter:
      return substitute(lookup(t.phrases, "after"), vars);
    case PredicateKind::kBetween:
      return substitute(lookup(t.phrases, "between"), vars);
    case PredicateKind::kCount:
      break;
  }
  throw MissingTemplate("count has no location phrase");
}

std::string describe(const LanguageTemplates& t, const std::vector<ProcedureStep>& steps,
                     std::size_t count) {
  std::string out = phrase(t, steps[count - 1]);
  for (std::size_t j = count - 1; j-- > 0;) {
    out = substitute(lookup(t.phrases, "nest"), Vars{{"child", out}, {"parent", phrase(t, steps[j])}});
  }
  return out;
}

std::string display_value(const LanguageTemplates& t, const std::string& value) {
  std::string shown;
  for (char c : value) {
    if (c == '\n') {
      shown += "\\n";
    } else {
      shown.push_back(c);
    }
  }
  return t.quote_open + shown + t.quote_close;
}

void capitalize(std::string& s) {
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
}

LanguageTemplates parse_language_templates(const nlohmann::json& j) {
  LanguageTemplates t;
  t.header = j.at("header").get<std::string>();
  t.quote_open = j.at("quote_open").get<std::string>();
  t.quote_close = j.at("quote_close").get<std::string>();
  t.response = j.at("response").get<std::string>();
  for (const auto& [level, forms] : j.at("levels").items()) {
    t.levels[level] = {forms.at(0).get<std::string>(), forms.at(1).get<std::string>()};
  }
  if (j.contains("level_notes")) {
    for (const auto& [level, note] : j.at("level_notes").items()) {
      t.level_notes[level] = note.get<std::string>();
    }
  }
  if (j.contains("ordinals")) t.ordinals = j.at("ordinals").get<std::vector<std::string>>();
  for (const auto& [name, text] : j.at("phrases").items()) t.phrases[name] = text.get<std::string>();
  for (const auto& [kind, by_relation] : j.at("templates").items()) {
    if (!parse_predicate_kind(kind)) throw std::runtime_error("unknown predicate '" + kind + "'");
    for (const auto& [relation, text] : by_relation.items()) {
      if (!parse_relation(relation)) throw std::runtime_error("unknown relation '" + relation + "'");
      t.templates[{kind, relation}] = text.get<std::string>();
    }
  }
  return t;
}

}  // namespace

const TemplateSet& TemplateSet::builtin() {
  static const TemplateSet set = from_json(kBuiltinTemplates);
  return set;
}

TemplateSet TemplateSet::from_json(std::string_view json_text) {
  TemplateSet set;
  try {
    const auto j = nlohmann::json::parse(json_text);
    for (const auto& [lang, body] : j.items()) {
      const auto language = lexeval::parse_language(lang);
      if (!language) throw std::runtime_error("unknown language '" + lang + "'");
      set.languages_[*language] = parse_language_templates(body);
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("template file: ") + e.what());
  }
  return set;
}

TemplateSet TemplateSet::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open template file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

const LanguageTemplates& TemplateSet::language(Language lang) const {
  auto it = languages_.find(lang);
  if (it == languages_.end()) {
    throw MissingTemplate("no templates for language " + std::string(to_string(lang)));
  }
  return it->second;
}

bool TemplateSet::has(Language lang, PredicateKind kind, Relation relation) const {
  auto it = languages_.find(lang);
  if (it == languages_.end()) return false;
  return it->second.templates.count({std::string(to_string(kind)), std::string(to_string(relation))}) > 0;
}

std::string render_rule(const Rule& rule, Language language, const TemplateSet& templates) {
  require_valid(rule);
  const LanguageTemplates& t = templates.language(language);
  const ProcedureStep& terminal = rule.terminal();
  const std::string kind(to_string(terminal.predicate.kind));
  const std::string relation(to_string(rule.relation));
  auto it = t.templates.find({kind, relation});
  if (it == t.templates.end()) {
    throw MissingTemplate("no template for (" + kind + ", " + relation + ", " +
                          std::string(to_string(language)) + ")");
  }

  Vars vars;
  if (rule.counts()) {
    const auto n = std::get<std::int64_t>(rule.value);
    vars["n"] = std::to_string(n);
    vars["value"] = std::to_string(n);
    vars["level"] = level_noun(t, terminal, n != 1);
    vars["position"] =
        rule.procedure.size() > 1 ? describe(t, rule.procedure, rule.procedure.size() - 1) : t.response;
    auto note = t.level_notes.find(std::string(to_string(terminal.level)));
    vars["level_note"] = note == t.level_notes.end() ? "" : note->second;
  } else {
    vars["value"] = display_value(t, std::get<std::string>(rule.value));
    vars["level"] = level_noun(t, terminal, false);
    vars["position"] = describe(t, rule.procedure, rule.procedure.size());
    vars["level_note"] = "";
    vars["n"] = std::to_string(terminal.predicate.n);
  }
  std::string sentence = substitute(it->second, vars);
  capitalize(sentence);
  return sentence;
}

std::string render_prompt(const std::vector<Rule>& rules, Language language,
                          std::string_view seed_task, const TemplateSet& templates) {
  const LanguageTemplates& t = templates.language(language);
  std::string out(seed_task);
  if (!out.empty()) out += "\n\n";
  out += t.header;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    out += '\n';
    out += std::to_string(i + 1);
    out += ". ";
    out += render_rule(rules[i], language, templates);
  }
  return out;
}

}  // namespace lexeval
