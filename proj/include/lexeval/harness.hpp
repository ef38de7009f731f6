#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lexeval/codec.hpp"
#include "lexeval/rule.hpp"

namespace lexeval {

/// Accuracies are fractions in [0, 1]. `n` is the number of scored
/// instructions in the slice (the rounded mean for merged reports).
struct SliceStats {
  std::size_t n = 0;
  double strict = 0.0;
  double loose = 0.0;

  double gain() const { return loose - strict; }
  friend bool operator==(const SliceStats&, const SliceStats&) = default;
};

struct InstructionVerdict {
  std::string id;
  Language language = Language::kEn;
  Difficulty difficulty = Difficulty::kEasy;
  int depth = 0;
  int count = 0;
  bool strict_pass = false;
  bool loose_pass = false;
  std::optional<std::string> loose_variant;

  friend bool operator==(const InstructionVerdict&, const InstructionVerdict&) = default;
};

struct HeatCell {
  int depth = 0;
  int count = 0;
  std::size_t n = 0;
  double strict = 0.0;
  double loose = 0.0;

  friend bool operator==(const HeatCell&, const HeatCell&) = default;
};

struct EvalReport {
  std::string label;
  SliceStats overall;
  std::map<Language, SliceStats> by_language;
  std::map<Difficulty, SliceStats> by_difficulty;
  std::map<std::pair<int, int>, SliceStats> cells;  // (depth, count)
  std::vector<InstructionVerdict> verdicts;           // instruction-file order
  std::vector<std::string> unscored;                  // instruction-file order

  double gain() const { return overall.gain(); }
  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

struct ScoreOptions {
  unsigned jobs = 1;
  bool strict_only = false;
  std::string label;
};

/// Throws DataError for unknown or duplicate response ids.
EvalReport score(const std::vector<Instruction>& instructions,
                 const std::vector<ResponseRecord>& responses, const ScoreOptions& options = {});
EvalReport score_files(const std::string& instructions_path, const std::string& responses_path,
                       const ScoreOptions& options = {});

/// Rebuilds every slice from per-instruction verdicts.
EvalReport aggregate(std::vector<InstructionVerdict> verdicts, std::vector<std::string> unscored,
                     std::string label = {});

/// Non-empty cells sorted by (depth, count).
std::vector<HeatCell> heatmap(const EvalReport& report);

/// Equal-weight average of each slice over the reports containing it.
/// Verdicts survive only when every input carries the same list.
EvalReport merge_reports(const std::vector<EvalReport>& reports);

enum class ReportFormat { kStructured, kTable, kCsv };
std::optional<ReportFormat> parse_report_format(std::string_view name);

std::string render_report(const EvalReport& report, ReportFormat format);
/// Several reports as rows of one table (table format only; other formats
/// concatenate).
std::string render_reports(const std::vector<EvalReport>& reports, ReportFormat format);

nlohmann::json report_to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);

/// Parses the structured or csv rendering. Throws DataError.
EvalReport parse_report(std::string_view text);
EvalReport load_report(const std::string& path);

/// One decimal of a percentage, e.g. 0.22747 -> "22.7".
std::string percent(double fraction);

}  // namespace lexeval
