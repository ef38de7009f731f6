#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lexeval/codec.hpp"

namespace lexeval {

/// Chat-completions endpoint settings. The credential is read from the
/// environment variable named by `api_key_env` (no credential when empty).
struct EndpointConfig {
  std::string base_url;  // e.g. "http://127.0.0.1:8000/v1"
  std::string model;
  double temperature = 0.0;
  double top_p = 1.0;
  int max_tokens = 2048;
  std::string api_key_env;
  unsigned concurrency = 4;
  int timeout_s = 120;
  int attempts = 3;
  int backoff_ms = 500;  // doubled after each failed attempt

  /// Throws ConfigError.
  static EndpointConfig from_json(const nlohmann::json& j);
  static EndpointConfig load(const std::string& path);
};

struct CollectOptions {
  std::string responses_path;  // append-only; doubles as the resume journal
  std::string errors_path;     // rewritten each run
  /// Called once per request attempt with the instruction id.
  std::function<void(const std::string&)> on_request;
};

struct CollectSummary {
  std::size_t skipped = 0;  // already present in the responses file
  std::size_t completed = 0;
  std::size_t failed = 0;

  bool partial() const { return failed > 0; }
};

/// Requests a response for every instruction missing from the responses
/// file. Throws ConfigError before any request when the endpoint or credential
/// is unusable, DataError when the existing responses file is corrupt.
CollectSummary collect(const std::vector<Instruction>& instructions, const EndpointConfig& endpoint,
                       const CollectOptions& options);

}  // namespace lexeval
