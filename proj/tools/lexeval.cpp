// lexeval command-line interface.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 data error,
// 3 partial collection.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "lexeval/codec.hpp"
#include "lexeval/collect.hpp"
#include "lexeval/dsl.hpp"
#include "lexeval/engine.hpp"
#include "lexeval/generator.hpp"
#include "lexeval/harness.hpp"
#include "lexeval/render.hpp"

namespace {

using namespace lexeval;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitPartial = 3;

Language language_arg(const std::string& name) {
  auto lang = parse_language(name);
  if (!lang) throw ConfigError("unknown language '" + name + "'");
  return *lang;
}

ReportFormat format_arg(const std::string& name) {
  auto format = parse_report_format(name);
  if (!format) throw ConfigError("unknown format '" + name + "'");
  return *format;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
}

const TemplateSet& templates_arg(const std::string& path, TemplateSet& storage) {
  if (path.empty()) return TemplateSet::builtin();
  try {
    storage = TemplateSet::load(path);
  } catch (const std::runtime_error& e) {
    throw ConfigError(e.what());
  }
  return storage;
}

// Runs `command` with the prompt on stdin; a non-zero exit vetoes.
ScreenFn screen_command(const std::string& command) {
  if (command.empty()) return {};
  return [command](const Instruction& instr) {
    FILE* pipe = popen((command + " >/dev/null").c_str(), "w");
    if (!pipe) throw ConfigError("cannot run screen command");
    std::fwrite(instr.prompt.data(), 1, instr.prompt.size(), pipe);
    return pclose(pipe) == 0;
  };
}

std::string describe(const InvalidRule& e) {
  std::string out = "invalid rule:";
  for (Violation v : e.violations()) out += fmt::format(" {}", to_string(v));
  return out;
}

struct Args {
  std::string lang = "en";
  std::string format = "table";
  std::string output;
  std::string templates;
  std::string rule;
  std::vector<std::string> rules;
  std::string rules_file;
  std::string task;
  std::string config;
  std::string instructions;
  std::string responses;
  std::string endpoint;
  std::string errors;
  std::string label;
  std::string screen;
  std::vector<std::string> reports;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  bool strict_only = false;
  bool merge = false;
};

int run_verify(const Args& a) {
  std::string text((std::istreambuf_iterator<char>(std::cin)), std::istreambuf_iterator<char>());
  Instruction instr;
  instr.language = language_arg(a.lang);
  instr.rules = {dsl::parse_rule(a.rule)};
  const Verdict v = verify_instruction(instr, text, a.strict_only);
  if (format_arg(a.format) == ReportFormat::kStructured) {
    nlohmann::json j{{"rule", dsl::format_rule(instr.rules.front())},
                     {"strict_pass", v.strict_pass},
                     {"loose_pass", v.loose_pass}};
    if (v.loose_variant) j["loose_variant"] = *v.loose_variant;
    std::cout << j.dump() << '\n';
  } else {
    const auto word = [](bool pass) { return pass ? "pass" : "fail"; };
    std::cout << fmt::format("strict {}\n", word(v.strict_pass));
    if (!a.strict_only) {
      std::cout << fmt::format("loose {}{}\n", word(v.loose_pass),
                               v.loose_variant ? " (" + *v.loose_variant + ")" : "");
    }
  }
  return 0;
}

int run_generate(const Args& a, CLI::App& cmd) {
  GenConfig config = load_gen_config(a.config);
  if (cmd.count("--seed")) config.seed = a.seed;
  if (cmd.count("--lang")) {
    const Language lang = language_arg(a.lang);
    if (lang != config.language) {
      const GenConfig defaults = GenConfig::defaults(lang);
      config.language = lang;
      config.lexicon = defaults.lexicon;
      config.seed_tasks = defaults.seed_tasks;
    }
  }
  TemplateSet storage;
  const TemplateSet& templates = templates_arg(a.templates, storage);
  std::vector<Instruction> data;
  try {
    data = generate_dataset(config, templates, screen_command(a.screen));
  } catch (const BucketUnfillable& e) {
    throw ConfigError(e.what());
  }
  emit(a.output, encode_instructions(data));
  return 0;
}

int run_render(const Args& a) {
  std::vector<Rule> rules;
  for (const auto& r : a.rules) rules.push_back(dsl::parse_rule(r));
  if (!a.rules_file.empty()) {
    std::istringstream in(read_file(a.rules_file));
    std::string line;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") != std::string::npos) rules.push_back(dsl::parse_rule(line));
    }
  }
  if (rules.empty()) throw ConfigError("render: no rules given");
  TemplateSet storage;
  const TemplateSet& templates = templates_arg(a.templates, storage);
  emit(a.output, render_prompt(rules, language_arg(a.lang), a.task, templates) + "\n");
  return 0;
}

int run_collect(const Args& a, CLI::App& cmd) {
  EndpointConfig endpoint = EndpointConfig::load(a.endpoint);
  if (cmd.count("--jobs")) endpoint.concurrency = a.jobs;
  const auto instructions = load_instructions(a.instructions);
  CollectOptions options;
  options.responses_path = a.output;
  options.errors_path = a.errors.empty() ? a.output + ".errors.jsonl" : a.errors;
  const CollectSummary s = collect(instructions, endpoint, options);
  std::cerr << fmt::format("collected {}, skipped {}, failed {}\n", s.completed, s.skipped, s.failed);
  return s.partial() ? kExitPartial : 0;
}

int run_score(const Args& a, CLI::App& cmd) {
  auto instructions = load_instructions(a.instructions);
  auto responses = load_responses(a.responses);
  if (cmd.count("--lang")) {
    // Unknown ids still fail; ids of other languages are dropped.
    std::set<std::string> known;
    for (const auto& i : instructions) known.insert(i.id);
    for (const auto& r : responses) {
      if (!known.count(r.id)) throw DataError(0, "unknown response id " + r.id);
    }
    const Language lang = language_arg(a.lang);
    std::erase_if(instructions, [&](const Instruction& i) { return i.language != lang; });
    std::set<std::string> kept;
    for (const auto& i : instructions) kept.insert(i.id);
    std::erase_if(responses, [&](const ResponseRecord& r) { return !kept.count(r.id); });
  }
  ScoreOptions options;
  options.jobs = a.jobs;
  options.strict_only = a.strict_only;
  options.label = a.label;
  const EvalReport report = score(instructions, responses, options);
  emit(a.output, render_report(report, format_arg(a.format)));
  return 0;
}

int run_report(const Args& a) {
  std::vector<EvalReport> reports;
  for (const auto& path : a.reports) reports.push_back(load_report(path));
  if (a.merge) {
    EvalReport merged = merge_reports(reports);
    if (!a.label.empty()) merged.label = a.label;
    reports = {std::move(merged)};
  }
  emit(a.output, render_reports(reports, format_arg(a.format)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lexical constraint verification toolkit"};
  app.require_subcommand(1);
  Args a;

  auto* verify = app.add_subcommand("verify", "Check one rule against text on stdin");
  verify->add_option("--rule,-r", a.rule, "Rule in DSL syntax")->required();
  verify->add_option("--lang", a.lang, "en or zh");
  verify->add_option("--format", a.format, "table or structured");
  verify->add_flag("--strict-only", a.strict_only, "Skip loose evaluation");

  auto* generate = app.add_subcommand("generate", "Generate an instruction file");
  generate->add_option("--config,-c", a.config, "Generation config (JSON)")->required();
  generate->add_option("--seed", a.seed, "Override the config seed");
  generate->add_option("--lang", a.lang, "Override the config language");
  generate->add_option("--templates", a.templates, "Template file (JSON)");
  generate->add_option("--screen-cmd", a.screen, "Command that vetoes a prompt by exiting non-zero");
  generate->add_option("-o,--output", a.output, "Output file (default stdout)");

  auto* render = app.add_subcommand("render", "Render rules into a prompt");
  render->add_option("--rule,-r", a.rules, "Rule in DSL syntax (repeatable)");
  render->add_option("--rules-file", a.rules_file, "One DSL rule per line");
  render->add_option("--task", a.task, "Seed task text");
  render->add_option("--lang", a.lang, "en or zh");
  render->add_option("--templates", a.templates, "Template file (JSON)");
  render->add_option("-o,--output", a.output, "Output file (default stdout)");

  auto* collect_cmd = app.add_subcommand("collect", "Query an endpoint for responses");
  collect_cmd->add_option("--instructions,-i", a.instructions, "Instruction file")->required();
  collect_cmd->add_option("--endpoint,-e", a.endpoint, "Endpoint config (JSON)")->required();
  collect_cmd->add_option("-o,--output", a.output, "Responses file (appended, resumable)")->required();
  collect_cmd->add_option("--errors", a.errors, "Error log (default <output>.errors.jsonl)");
  collect_cmd->add_option("--jobs", a.jobs, "Concurrent requests (overrides config)")
      ->check(CLI::PositiveNumber);

  auto* score_cmd = app.add_subcommand("score", "Score responses");
  score_cmd->add_option("--instructions,-i", a.instructions, "Instruction file")->required();
  score_cmd->add_option("--responses,-R", a.responses, "Responses file")->required();
  score_cmd->add_option("--jobs", a.jobs, "Worker threads")->check(CLI::PositiveNumber);
  score_cmd->add_option("--lang", a.lang, "Score one language only");
  score_cmd->add_flag("--strict-only", a.strict_only, "Skip loose evaluation");
  score_cmd->add_option("--format", a.format, "structured, table or csv");
  score_cmd->add_option("--label", a.label, "Model name shown in tables");
  score_cmd->add_option("-o,--output", a.output, "Output file (default stdout)");

  auto* report = app.add_subcommand("report", "Format or merge reports");
  report->add_option("reports", a.reports, "Report files (structured or csv)")->required();
  report->add_flag("--merge", a.merge, "Average the reports into one");
  report->add_option("--label", a.label, "Label of the merged report");
  report->add_option("--format", a.format, "structured, table or csv");
  report->add_option("-o,--output", a.output, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*verify) return run_verify(a);
    if (*generate) return run_generate(a, *generate);
    if (*render) return run_render(a);
    if (*collect_cmd) return run_collect(a, *collect_cmd);
    if (*score_cmd) return run_score(a, *score_cmd);
    if (*report) return run_report(a);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const dsl::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidRule& e) {
    std::cerr << "error: " << describe(e) << '\n';
    return kExitUsage;
  } catch (const MissingTemplate& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
