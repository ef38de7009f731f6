#include "lexeval/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <set>
#include <thread>
#include <unordered_map>

#include <fmt/format.h>

#include "lexeval/engine.hpp"

namespace lexeval {

using nlohmann::json;

namespace {

struct Tally {
  std::size_t n = 0;
  std::size_t strict = 0;
  std::size_t loose = 0;

  void add(const InstructionVerdict& v) {
    ++n;
    strict += v.strict_pass ? 1 : 0;
    loose += v.loose_pass ? 1 : 0;
  }
  SliceStats stats() const {
    if (n == 0) return {};
    const auto d = static_cast<double>(n);
    return {n, static_cast<double>(strict) / d, static_cast<double>(loose) / d};
  }
};

// Mean that returns the common value exactly when all inputs agree, so that
// merging identical reports is the identity.
double mean(const std::vector<double>& xs) {
  if (std::all_of(xs.begin(), xs.end(), [&](double x) { return x == xs.front(); })) return xs.front();
  double sum = 0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

SliceStats mean_slice(const std::vector<SliceStats>& slices) {
  std::vector<double> n, strict, loose;
  for (const auto& s : slices) {
    n.push_back(static_cast<double>(s.n));
    strict.push_back(s.strict);
    loose.push_back(s.loose);
  }
  return {static_cast<std::size_t>(std::llround(mean(n))), mean(strict), mean(loose)};
}

template <typename Key>
std::map<Key, SliceStats> merge_maps(const std::vector<EvalReport>& reports,
                                     std::map<Key, SliceStats> EvalReport::*member) {
  std::map<Key, std::vector<SliceStats>> gathered;
  for (const auto& r : reports) {
    for (const auto& [key, slice] : r.*member) gathered[key].push_back(slice);
  }
  std::map<Key, SliceStats> out;
  for (const auto& [key, slices] : gathered) out[key] = mean_slice(slices);
  return out;
}

json slice_to_json(const SliceStats& s) {
  return json{{"n", s.n}, {"strict", s.strict}, {"loose", s.loose}};
}

SliceStats slice_from_json(const json& j) {
  return {j.at("n").get<std::size_t>(), j.at("strict").get<double>(), j.at("loose").get<double>()};
}

template <typename T>
T require(std::optional<T> value, std::string_view what, std::string_view text) {
  if (!value) throw std::invalid_argument(fmt::format("unknown {} '{}'", what, text));
  return *value;
}

std::string cell_or_dash(const std::map<Language, SliceStats>& m, Language lang, bool strict) {
  auto it = m.find(lang);
  if (it == m.end() || it->second.n == 0) return "-";
  return percent(strict ? it->second.strict : it->second.loose);
}

std::string display_label(const EvalReport& r) { return r.label.empty() ? "model" : r.label; }

void render_table(std::string& out, const std::vector<EvalReport>& reports) {
  out += "| Model | Strict CN | Strict EN | Strict Overall | Loose CN | Loose EN | Loose Overall | Gain |\n";
  out += "|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : reports) {
    out += fmt::format("| {} | {} | {} | {} | {} | {} | {} | {} |\n", display_label(r),
                       cell_or_dash(r.by_language, Language::kZh, true),
                       cell_or_dash(r.by_language, Language::kEn, true), percent(r.overall.strict),
                       cell_or_dash(r.by_language, Language::kZh, false),
                       cell_or_dash(r.by_language, Language::kEn, false), percent(r.overall.loose),
                       percent(r.gain()));
  }
  for (const auto& r : reports) {
    out += fmt::format("\n{}: by difficulty\n\n", display_label(r));
    out += "| Difficulty | n | Strict | Loose |\n|---|---|---|---|\n";
    for (const auto& [d, s] : r.by_difficulty) {
      out += fmt::format("| {} | {} | {} | {} |\n", to_string(d), s.n, percent(s.strict), percent(s.loose));
    }
    out += fmt::format("\n{}: strict accuracy by depth and constraint count\n\n", display_label(r));
    out += "| Depth | Count | n | Strict |\n|---|---|---|---|\n";
    for (const HeatCell& c : heatmap(r)) {
      out += fmt::format("| {} | {} | {} | {} |\n", c.depth, c.count, c.n, percent(c.strict));
    }
    if (!r.unscored.empty()) out += fmt::format("\n{} unscored instruction(s)\n", r.unscored.size());
  }
}

// CSV layout: one row per slice, cell, verdict or unscored id.
constexpr std::string_view kCsvHeader = "kind,id,language,difficulty,depth,count,n,strict,loose,variant";

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string num(double x) { return fmt::format("{:.17g}", x); }

struct CsvRow {
  std::string kind{}, id{}, language{}, difficulty{}, depth{}, count{}, n{}, strict{}, loose{}, variant{};

  std::string line() const {
    return fmt::format("{},{},{},{},{},{},{},{},{},{}\n", csv_field(kind), csv_field(id), language,
                       difficulty, depth, count, n, strict, loose, csv_field(variant));
  }
};

std::string render_csv(const EvalReport& r) {
  std::string out(kCsvHeader);
  out += '\n';
  out += CsvRow{"label", r.label}.line();
  const auto slice_row = [](std::string kind, std::string lang, std::string diff, const SliceStats& s) {
    return CsvRow{std::move(kind), "", std::move(lang), std::move(diff), "", "",
                  std::to_string(s.n), num(s.strict), num(s.loose), ""};
  };
  out += slice_row("overall", "", "", r.overall).line();
  for (const auto& [l, s] : r.by_language) out += slice_row("language", std::string(to_string(l)), "", s).line();
  for (const auto& [d, s] : r.by_difficulty) {
    out += slice_row("difficulty", "", std::string(to_string(d)), s).line();
  }
  for (const auto& [key, s] : r.cells) {
    CsvRow row = slice_row("cell", "", "", s);
    row.depth = std::to_string(key.first);
    row.count = std::to_string(key.second);
    out += row.line();
  }
  for (const auto& v : r.verdicts) {
    out += CsvRow{"verdict",
                  v.id,
                  std::string(to_string(v.language)),
                  std::string(to_string(v.difficulty)),
                  std::to_string(v.depth),
                  std::to_string(v.count),
                  "",
                  v.strict_pass ? "1" : "0",
                  v.loose_pass ? "1" : "0",
                  v.loose_variant.value_or("")}
               .line();
  }
  for (const auto& id : r.unscored) out += CsvRow{"unscored", id}.line();
  return out;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    any = true;
    if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      row.push_back(std::move(field));
      field.clear();
      rows.push_back(std::move(row));
      row.clear();
      any = false;
    } else {
      field += c;
    }
  }
  if (quoted) throw DataError(rows.size() + 1, "unterminated quoted field");
  if (any || !field.empty() || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0') throw std::invalid_argument("bad number '" + s + "'");
  return x;
}

long long parse_int(const std::string& s) {
  std::size_t used = 0;
  const long long x = std::stoll(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad integer '" + s + "'");
  return x;
}

EvalReport report_from_csv(std::string_view text) {
  const auto rows = parse_csv(text);
  if (rows.empty() || rows.front().size() != 10) throw DataError(1, "missing csv header");
  EvalReport r;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& f = rows[i];
    if (f.size() == 1 && f[0].empty()) continue;
    if (f.size() != 10) throw DataError(i + 1, fmt::format("expected 10 fields, found {}", f.size()));
    try {
      const std::string& kind = f[0];
      const auto slice = [&] {
        return SliceStats{static_cast<std::size_t>(parse_int(f[6])), parse_double(f[7]), parse_double(f[8])};
      };
      if (kind == "label") {
        r.label = f[1];
      } else if (kind == "overall") {
        r.overall = slice();
      } else if (kind == "language") {
        r.by_language[require(parse_language(f[2]), "language", f[2])] = slice();
      } else if (kind == "difficulty") {
        r.by_difficulty[require(parse_difficulty(f[3]), "difficulty", f[3])] = slice();
      } else if (kind == "cell") {
        r.cells[{static_cast<int>(parse_int(f[4])), static_cast<int>(parse_int(f[5]))}] = slice();
      } else if (kind == "verdict") {
        InstructionVerdict v;
        v.id = f[1];
        v.language = require(parse_language(f[2]), "language", f[2]);
        v.difficulty = require(parse_difficulty(f[3]), "difficulty", f[3]);
        v.depth = static_cast<int>(parse_int(f[4]));
        v.count = static_cast<int>(parse_int(f[5]));
        v.strict_pass = f[7] == "1";
        v.loose_pass = f[8] == "1";
        if (!f[9].empty()) v.loose_variant = f[9];
        r.verdicts.push_back(std::move(v));
      } else if (kind == "unscored") {
        r.unscored.push_back(f[1]);
      } else {
        throw std::invalid_argument("unknown row kind '" + kind + "'");
      }
    } catch (const DataError&) {
      throw;
    } catch (const std::exception& e) {
      throw DataError(i + 1, e.what());
    }
  }
  return r;
}

}  // namespace

EvalReport score(const std::vector<Instruction>& instructions,
                 const std::vector<ResponseRecord>& responses, const ScoreOptions& options) {
  std::unordered_map<std::string_view, std::size_t> instruction_index;
  for (std::size_t i = 0; i < instructions.size(); ++i) {
    if (!instruction_index.emplace(instructions[i].id, i).second) {
      throw DataError(0, "duplicate instruction id " + instructions[i].id);
    }
  }
  std::vector<const std::string*> response_for(instructions.size(), nullptr);
  for (const auto& r : responses) {
    auto it = instruction_index.find(r.id);
    if (it == instruction_index.end()) throw DataError(0, "unknown response id " + r.id);
    if (response_for[it->second]) throw DataError(0, "duplicate response id " + r.id);
    response_for[it->second] = &r.response;
  }

  std::vector<std::optional<Verdict>> results(instructions.size());
  std::vector<std::exception_ptr> errors(instructions.size());
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < instructions.size(); i = next++) {
      if (!response_for[i]) continue;
      try {
        results[i] = verify_instruction(instructions[i], *response_for[i], options.strict_only);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned jobs = std::max(1u, options.jobs);
  if (jobs == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(work);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<InstructionVerdict> verdicts;
  std::vector<std::string> unscored;
  for (std::size_t i = 0; i < instructions.size(); ++i) {
    const Instruction& instr = instructions[i];
    if (!results[i]) {
      unscored.push_back(instr.id);
      continue;
    }
    verdicts.push_back({instr.id, instr.language, instr.difficulty, instr.depth, instr.count,
                        results[i]->strict_pass, results[i]->loose_pass, results[i]->loose_variant});
  }
  return aggregate(std::move(verdicts), std::move(unscored), options.label);
}

EvalReport score_files(const std::string& instructions_path, const std::string& responses_path,
                       const ScoreOptions& options) {
  return score(load_instructions(instructions_path), load_responses(responses_path), options);
}

EvalReport aggregate(std::vector<InstructionVerdict> verdicts, std::vector<std::string> unscored,
                     std::string label) {
  Tally overall;
  std::map<Language, Tally> languages;
  std::map<Difficulty, Tally> difficulties;
  std::map<std::pair<int, int>, Tally> cells;
  for (const auto& v : verdicts) {
    overall.add(v);
    languages[v.language].add(v);
    difficulties[v.difficulty].add(v);
    cells[{v.depth, v.count}].add(v);
  }
  EvalReport r;
  r.label = std::move(label);
  r.overall = overall.stats();
  for (const auto& [k, t] : languages) r.by_language[k] = t.stats();
  for (const auto& [k, t] : difficulties) r.by_difficulty[k] = t.stats();
  for (const auto& [k, t] : cells) r.cells[k] = t.stats();
  r.verdicts = std::move(verdicts);
  r.unscored = std::move(unscored);
  return r;
}

std::vector<HeatCell> heatmap(const EvalReport& report) {
  std::vector<HeatCell> out;
  for (const auto& [key, s] : report.cells) {
    if (s.n == 0) continue;
    out.push_back({key.first, key.second, s.n, s.strict, s.loose});
  }
  return out;
}

EvalReport merge_reports(const std::vector<EvalReport>& reports) {
  if (reports.empty()) return {};
  EvalReport out;
  out.label = reports.front().label;
  std::vector<SliceStats> overall;
  for (const auto& r : reports) overall.push_back(r.overall);
  out.overall = mean_slice(overall);
  out.by_language = merge_maps(reports, &EvalReport::by_language);
  out.by_difficulty = merge_maps(reports, &EvalReport::by_difficulty);
  out.cells = merge_maps(reports, &EvalReport::cells);
  const bool same_verdicts = std::all_of(reports.begin(), reports.end(), [&](const EvalReport& r) {
    return r.verdicts == reports.front().verdicts;
  });
  if (same_verdicts) out.verdicts = reports.front().verdicts;
  std::set<std::string> seen;
  for (const auto& r : reports) {
    for (const auto& id : r.unscored) {
      if (seen.insert(id).second) out.unscored.push_back(id);
    }
  }
  return out;
}

std::optional<ReportFormat> parse_report_format(std::string_view name) {
  if (name == "structured" || name == "json") return ReportFormat::kStructured;
  if (name == "table") return ReportFormat::kTable;
  if (name == "csv") return ReportFormat::kCsv;
  return std::nullopt;
}

std::string percent(double fraction) { return fmt::format("{:.1f}", fraction * 100.0); }

json report_to_json(const EvalReport& r) {
  json languages = json::object();
  for (const auto& [l, s] : r.by_language) languages[std::string(to_string(l))] = slice_to_json(s);
  json difficulties = json::object();
  for (const auto& [d, s] : r.by_difficulty) difficulties[std::string(to_string(d))] = slice_to_json(s);
  json cells = json::array();
  for (const auto& [key, s] : r.cells) {
    json c = slice_to_json(s);
    c["depth"] = key.first;
    c["count"] = key.second;
    cells.push_back(std::move(c));
  }
  json verdicts = json::array();
  for (const auto& v : r.verdicts) {
    json j{{"id", v.id},
           {"language", to_string(v.language)},
           {"difficulty", to_string(v.difficulty)},
           {"depth", v.depth},
           {"count", v.count},
           {"strict_pass", v.strict_pass},
           {"loose_pass", v.loose_pass}};
    if (v.loose_variant) j["loose_variant"] = *v.loose_variant;
    verdicts.push_back(std::move(j));
  }
  return json{{"label", r.label},
              {"overall", slice_to_json(r.overall)},
              {"gain", r.gain()},
              {"languages", std::move(languages)},
              {"difficulties", std::move(difficulties)},
              {"cells", std::move(cells)},
              {"verdicts", std::move(verdicts)},
              {"unscored", r.unscored}};
}

EvalReport report_from_json(const json& j) {
  EvalReport r;
  r.label = j.value("label", "");
  r.overall = slice_from_json(j.at("overall"));
  for (const auto& [k, s] : j.at("languages").items()) {
    r.by_language[require(parse_language(k), "language", k)] = slice_from_json(s);
  }
  for (const auto& [k, s] : j.at("difficulties").items()) {
    r.by_difficulty[require(parse_difficulty(k), "difficulty", k)] = slice_from_json(s);
  }
  for (const auto& c : j.at("cells")) {
    r.cells[{c.at("depth").get<int>(), c.at("count").get<int>()}] = slice_from_json(c);
  }
  for (const auto& v : j.at("verdicts")) {
    InstructionVerdict iv;
    iv.id = v.at("id").get<std::string>();
    const auto lang = v.at("language").get<std::string>();
    iv.language = require(parse_language(lang), "language", lang);
    const auto diff = v.at("difficulty").get<std::string>();
    iv.difficulty = require(parse_difficulty(diff), "difficulty", diff);
    iv.depth = v.at("depth").get<int>();
    iv.count = v.at("count").get<int>();
    iv.strict_pass = v.at("strict_pass").get<bool>();
    iv.loose_pass = v.at("loose_pass").get<bool>();
    if (v.contains("loose_variant")) iv.loose_variant = v.at("loose_variant").get<std::string>();
    r.verdicts.push_back(std::move(iv));
  }
  r.unscored = j.at("unscored").get<std::vector<std::string>>();
  return r;
}

std::string render_report(const EvalReport& report, ReportFormat format) {
  return render_reports({report}, format);
}

std::string render_reports(const std::vector<EvalReport>& reports, ReportFormat format) {
  std::string out;
  switch (format) {
    case ReportFormat::kStructured:
      for (const auto& r : reports) out += report_to_json(r).dump(2) + "\n";
      break;
    case ReportFormat::kTable:
      render_table(out, reports);
      break;
    case ReportFormat::kCsv:
      for (const auto& r : reports) out += render_csv(r);
      break;
  }
  return out;
}

EvalReport parse_report(std::string_view text) {
  const auto start = text.find_first_not_of(" \t\r\n");
  if (start != std::string_view::npos && text[start] == '{') {
    try {
      return report_from_json(json::parse(text));
    } catch (const std::exception& e) {
      throw DataError(0, std::string("report: ") + e.what());
    }
  }
  return report_from_csv(text);
}

EvalReport load_report(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const ConfigError& e) {
    throw DataError(0, e.what());
  }
  return parse_report(text);
}

}  // namespace lexeval
