#include "lexeval/codec.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "lexeval/dsl.hpp"

namespace lexeval {

using nlohmann::json;

namespace {

template <typename T>
T parse_enum(const json& j, const char* field, std::optional<T> (*parse)(std::string_view)) {
  const auto& text = j.at(field).get_ref<const std::string&>();
  auto value = parse(text);
  if (!value) throw std::invalid_argument(fmt::format("unknown {} '{}'", field, text));
  return *value;
}

std::string describe_failure(const std::exception& e) {
  if (const auto* invalid = dynamic_cast<const InvalidRule*>(&e)) {
    std::string out = "invalid rule:";
    for (Violation v : invalid->violations()) out += fmt::format(" {}", to_string(v));
    return out;
  }
  return e.what();
}

template <typename T, typename Parse>
std::vector<T> read_records(std::istream& in, Parse parse) {
  std::vector<T> out;
  std::set<std::string> ids;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    T record;
    try {
      record = parse(json::parse(line));
    } catch (const std::exception& e) {
      throw DataError(number, describe_failure(e));
    }
    if (!ids.insert(record.id).second) throw DataError(number, "duplicate id " + record.id);
    out.push_back(std::move(record));
  }
  return out;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(0, "cannot open " + path);
  return in;
}

}  // namespace

DataError::DataError(std::size_t line, const std::string& reason)
    : std::runtime_error(line == 0 ? reason : fmt::format("line {}: {}", line, reason)), line_(line) {}

json rule_to_json(const Rule& rule) {
  json steps = json::array();
  for (const ProcedureStep& step : rule.procedure) {
    json s{{"level", to_string(step.level)}, {"predicate", to_string(step.predicate.kind)}};
    if (step.predicate.takes_ordinal()) s["n"] = step.predicate.n;
    if (step.pattern) s["pattern"] = *step.pattern;
    steps.push_back(std::move(s));
  }
  json j{{"procedure", std::move(steps)}, {"relation", to_string(rule.relation)}};
  std::visit([&](const auto& v) { j["value"] = v; }, rule.value);
  return j;
}

Rule rule_from_json(const json& j) {
  if (j.is_string()) return dsl::parse_rule(j.get<std::string>());
  if (!j.is_object()) throw std::invalid_argument("rule must be an object or a DSL string");
  Rule rule;
  for (const json& s : j.at("procedure")) {
    ProcedureStep step;
    step.level = parse_enum<Level>(s, "level", parse_level);
    step.predicate.kind = parse_enum<PredicateKind>(s, "predicate", parse_predicate_kind);
    if (step.predicate.takes_ordinal()) step.predicate.n = s.at("n").get<int>();
    if (s.contains("pattern")) step.pattern = s.at("pattern").get<std::string>();
    rule.procedure.push_back(std::move(step));
  }
  rule.relation = parse_enum<Relation>(j, "relation", parse_relation);
  const json& value = j.at("value");
  if (value.is_number_integer()) {
    rule.value = value.get<std::int64_t>();
  } else if (value.is_string()) {
    rule.value = value.get<std::string>();
  } else {
    throw std::invalid_argument("value must be an integer or a string");
  }
  require_valid(rule);
  return rule;
}

json instruction_to_json(const Instruction& instruction) {
  json rules = json::array();
  for (const Rule& r : instruction.rules) rules.push_back(rule_to_json(r));
  return json{{"id", instruction.id},
              {"language", to_string(instruction.language)},
              {"prompt", instruction.prompt},
              {"rules", std::move(rules)},
              {"difficulty", to_string(instruction.difficulty)},
              {"depth", instruction.depth},
              {"count", instruction.count}};
}

Instruction instruction_from_json(const json& j) {
  Instruction instr;
  instr.id = j.at("id").get<std::string>();
  if (instr.id.empty()) throw std::invalid_argument("empty id");
  instr.language = parse_enum<Language>(j, "language", parse_language);
  instr.prompt = j.at("prompt").get<std::string>();
  for (const json& r : j.at("rules")) instr.rules.push_back(rule_from_json(r));
  if (instr.rules.empty()) throw std::invalid_argument("instruction has no rules");
  instr.difficulty = parse_enum<Difficulty>(j, "difficulty", parse_difficulty);
  instr.depth = j.at("depth").get<int>();
  instr.count = j.at("count").get<int>();

  const auto grade = grade_difficulty(instr.rules).grade;
  if (grade != instr.difficulty) {
    throw std::invalid_argument(fmt::format("difficulty '{}' disagrees with rules ('{}')",
                                            to_string(instr.difficulty), to_string(grade)));
  }
  if (instr.depth != instruction_depth(instr.rules)) {
    throw std::invalid_argument(fmt::format("depth {} disagrees with rules ({})", instr.depth,
                                            instruction_depth(instr.rules)));
  }
  if (instr.count != static_cast<int>(instr.rules.size())) {
    throw std::invalid_argument(
        fmt::format("count {} disagrees with rules ({})", instr.count, instr.rules.size()));
  }
  return instr;
}

json response_to_json(const ResponseRecord& record) {
  json j{{"id", record.id}, {"response", record.response}};
  if (record.latency_ms) j["latency_ms"] = *record.latency_ms;
  return j;
}

ResponseRecord response_from_json(const json& j) {
  ResponseRecord r;
  r.id = j.at("id").get<std::string>();
  r.response = j.at("response").get<std::string>();
  if (j.contains("latency_ms")) r.latency_ms = j.at("latency_ms").get<double>();
  return r;
}

void write_instructions(std::ostream& out, const std::vector<Instruction>& instructions) {
  for (const Instruction& instr : instructions) out << instruction_to_json(instr).dump() << '\n';
}

std::string encode_instructions(const std::vector<Instruction>& instructions) {
  std::ostringstream out;
  write_instructions(out, instructions);
  return out.str();
}

std::vector<Instruction> read_instructions(std::istream& in) {
  return read_records<Instruction>(in, instruction_from_json);
}

std::vector<Instruction> load_instructions(const std::string& path) {
  auto in = open_input(path);
  return read_instructions(in);
}

std::vector<ResponseRecord> read_responses(std::istream& in) {
  return read_records<ResponseRecord>(in, response_from_json);
}

std::vector<ResponseRecord> load_responses(const std::string& path) {
  auto in = open_input(path);
  return read_responses(in);
}

void write_responses(std::ostream& out, const std::vector<ResponseRecord>& records) {
  for (const ResponseRecord& r : records) out << response_to_json(r).dump() << '\n';
}

GenConfig gen_config_from_json(const json& j, const std::string& base_dir) {
  try {
    Language language = Language::kEn;
    if (j.contains("language")) language = parse_enum<Language>(j, "language", parse_language);
    GenConfig config = GenConfig::defaults(language);
    if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("counts")) {
      const json& c = j.at("counts");
      if (c.is_array()) {
        config.counts = c.get<std::array<int, 3>>();
      } else {
        config.counts = {c.value("easy", 0), c.value("medium", 0), c.value("hard", 0)};
      }
    }
    if (j.contains("max_depth")) config.max_depth = j.at("max_depth").get<int>();
    if (j.contains("max_constraints")) config.max_constraints = j.at("max_constraints").get<int>();
    if (j.contains("seed_tasks")) config.seed_tasks = j.at("seed_tasks").get<std::vector<std::string>>();
    if (j.contains("seed_tasks_file")) {
      std::filesystem::path p = j.at("seed_tasks_file").get<std::string>();
      if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
      config.seed_tasks = load_seed_tasks(p.string());
    }
    if (j.contains("lexicon")) {
      const json& lex = j.at("lexicon");
      const auto take = [&](const char* name, std::vector<std::string>& slot) {
        if (lex.contains(name)) slot = lex.at(name).get<std::vector<std::string>>();
      };
      take("words", config.lexicon.words);
      take("phrases", config.lexicon.phrases);
      take("characters", config.lexicon.characters);
      take("letters", config.lexicon.letters);
      take("punctuation", config.lexicon.punctuation);
      take("endings", config.lexicon.endings);
      take("patterns", config.lexicon.patterns);
    }
    config.validate();
    return config;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("generation config: ") + e.what());
  }
}

GenConfig load_gen_config(const std::string& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("{}: {}", path, e.what()));
  }
  return gen_config_from_json(j, std::filesystem::path(path).parent_path().string());
}

std::vector<std::string> load_seed_tasks(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open seed task file " + path);
  std::vector<std::string> tasks;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") != std::string::npos) tasks.push_back(line);
  }
  return tasks;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace lexeval
