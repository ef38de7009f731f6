#pragma once

// Structured encodings and line-delimited record files.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "lexeval/generator.hpp"
#include "lexeval/rule.hpp"

namespace lexeval {

/// Bad input data. `line` is 1-based, 0 when not tied to a line.
class DataError : public std::runtime_error {
 public:
  DataError(std::size_t line, const std::string& reason);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Bad configuration or usage, detected before any work starts.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ResponseRecord {
  std::string id;
  std::string response;
  std::optional<double> latency_ms;

  friend bool operator==(const ResponseRecord&, const ResponseRecord&) = default;
};

nlohmann::json rule_to_json(const Rule& rule);
/// Accepts the structured object or a DSL string. Throws std::invalid_argument,
/// dsl::ParseError or InvalidRule.
Rule rule_from_json(const nlohmann::json& j);

nlohmann::json instruction_to_json(const Instruction& instruction);
/// Rejects records whose difficulty, depth or count disagree with the rules.
Instruction instruction_from_json(const nlohmann::json& j);

nlohmann::json response_to_json(const ResponseRecord& record);
ResponseRecord response_from_json(const nlohmann::json& j);

/// One compact JSON object per line.
void write_instructions(std::ostream& out, const std::vector<Instruction>& instructions);
std::string encode_instructions(const std::vector<Instruction>& instructions);

/// Throw DataError with the offending line; duplicate ids are rejected.
std::vector<Instruction> read_instructions(std::istream& in);
std::vector<Instruction> load_instructions(const std::string& path);
std::vector<ResponseRecord> read_responses(std::istream& in);
std::vector<ResponseRecord> load_responses(const std::string& path);

void write_responses(std::ostream& out, const std::vector<ResponseRecord>& records);

/// GenConfig file: {"seed", "language", "counts": {"easy","medium","hard"},
/// "max_depth", "max_constraints", "seed_tasks" | "seed_tasks_file",
/// "lexicon": {...}}. Missing fields fall back to GenConfig::defaults;
/// lexicon lists replace the builtin list of the same name. Relative
/// seed_tasks_file paths resolve against `base_dir`. Throws ConfigError.
GenConfig gen_config_from_json(const nlohmann::json& j, const std::string& base_dir = ".");
GenConfig load_gen_config(const std::string& path);

/// One prompt per non-empty line.
std::vector<std::string> load_seed_tasks(const std::string& path);

std::string read_file(const std::string& path);

}  // namespace lexeval
