#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lexeval/rule.hpp"

namespace lexeval {

class MissingTemplate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sentence templates and phrase fragments for one language.
///
/// Templates are keyed by (terminal predicate kind, relation) and may use the
/// placeholders {n}, {value}, {level}, {position} and {level_note}.
struct LanguageTemplates {
  std::string header;
  std::string quote_open;
  std::string quote_close;
  std::string response;
  std::map<std::string, std::pair<std::string, std::string>> levels;  // singular, plural
  std::map<std::string, std::string> level_notes;
  std::vector<std::string> ordinals;
  std::map<std::string, std::string> phrases;
  std::map<std::pair<std::string, std::string>, std::string> templates;
};

class TemplateSet {
 public:
  /// The templates shipped in data/templates.json.
  static const TemplateSet& builtin();
  /// Parses the JSON template file format; std::runtime_error on bad input.
  static TemplateSet from_json(std::string_view json_text);
  static TemplateSet load(const std::string& path);

  const LanguageTemplates& language(Language lang) const;
  bool has(Language lang, PredicateKind kind, Relation relation) const;

 private:
  std::map<Language, LanguageTemplates> languages_;
};

/// One requirement sentence for `rule`. Throws MissingTemplate.
std::string render_rule(const Rule& rule, Language language,
                        const TemplateSet& templates = TemplateSet::builtin());

/// Seed task, blank line, header, then one numbered requirement per rule.
/// The seed task and blank line are omitted when the task is empty.
std::string render_prompt(const std::vector<Rule>& rules, Language language,
                          std::string_view seed_task,
                          const TemplateSet& templates = TemplateSet::builtin());

}  // namespace lexeval
