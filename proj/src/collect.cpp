#include "lexeval/collect.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <regex>
#include <set>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>

namespace lexeval {

using nlohmann::json;

namespace {

struct Target {
  std::string origin;  // scheme://host[:port]
  std::string path;    // request path
};

Target parse_base_url(const std::string& url) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, kUrl)) throw ConfigError("endpoint: malformed base_url '" + url + "'");
  std::string prefix = m[2].str();
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (url.rfind("https://", 0) == 0) throw ConfigError("endpoint: built without TLS support");
#endif
  return {m[1].str(), prefix + "/chat/completions"};
}

struct Outcome {
  bool ok = false;
  std::string text;   // response content or error description
  int attempts = 0;
  double latency_ms = 0;
};

bool transient(int status) { return status == 429 || status >= 500; }

Outcome request_one(httplib::Client& client, const Target& target, const EndpointConfig& ep,
                    const std::string& credential, const Instruction& instr,
                    const CollectOptions& options) {
  const json body{{"model", ep.model},
                  {"messages", json::array({json{{"role", "user"}, {"content", instr.prompt}}})},
                  {"temperature", ep.temperature},
                  {"top_p", ep.top_p},
                  {"max_tokens", ep.max_tokens}};
  const std::string payload = body.dump();
  httplib::Headers headers;
  if (!credential.empty()) headers.emplace("Authorization", "Bearer " + credential);

  Outcome out;
  int backoff = ep.backoff_ms;
  for (int attempt = 1; attempt <= ep.attempts; ++attempt) {
    out.attempts = attempt;
    if (options.on_request) options.on_request(instr.id);
    const auto start = std::chrono::steady_clock::now();
    auto res = client.Post(target.path, headers, payload, "application/json");
    const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start);
    bool retry = false;
    if (!res) {
      out.text = "network error: " + httplib::to_string(res.error());
      retry = true;
    } else if (res->status != 200) {
      out.text = fmt::format("http status {}", res->status);
      retry = transient(res->status);
    } else {
      try {
        const auto reply = json::parse(res->body);
        out.text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
        out.ok = true;
        out.latency_ms = elapsed.count();
        return out;
      } catch (const std::exception& e) {
        out.text = std::string("malformed reply: ") + e.what();
      }
    }
    if (!retry || attempt == ep.attempts) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(backoff));
    backoff *= 2;
  }
  return out;
}

}  // namespace

EndpointConfig EndpointConfig::from_json(const json& j) {
  try {
    EndpointConfig c;
    c.base_url = j.at("base_url").get<std::string>();
    c.model = j.at("model").get<std::string>();
    c.temperature = j.value("temperature", c.temperature);
    c.top_p = j.value("top_p", c.top_p);
    c.max_tokens = j.value("max_tokens", c.max_tokens);
    c.api_key_env = j.value("api_key_env", c.api_key_env);
    c.concurrency = j.value("concurrency", c.concurrency);
    c.timeout_s = j.value("timeout_s", c.timeout_s);
    c.attempts = j.value("attempts", c.attempts);
    c.backoff_ms = j.value("backoff_ms", c.backoff_ms);
    if (c.model.empty()) throw ConfigError("endpoint: model is empty");
    if (c.max_tokens < 1) throw ConfigError("endpoint: max_tokens must be positive");
    if (c.concurrency < 1) throw ConfigError("endpoint: concurrency must be positive");
    if (c.attempts < 1) throw ConfigError("endpoint: attempts must be positive");
    if (c.backoff_ms < 0 || c.timeout_s < 1) throw ConfigError("endpoint: bad timing settings");
    parse_base_url(c.base_url);
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("endpoint: ") + e.what());
  }
}

EndpointConfig EndpointConfig::load(const std::string& path) {
  try {
    return from_json(json::parse(read_file(path)));
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("{}: {}", path, e.what()));
  }
}

CollectSummary collect(const std::vector<Instruction>& instructions, const EndpointConfig& endpoint,
                       const CollectOptions& options) {
  const Target target = parse_base_url(endpoint.base_url);
  std::string credential;
  if (!endpoint.api_key_env.empty()) {
    const char* value = std::getenv(endpoint.api_key_env.c_str());
    if (!value || !*value) {
      throw ConfigError("endpoint: environment variable " + endpoint.api_key_env + " is not set");
    }
    credential = value;
  }

  std::set<std::string> done;
  if (std::filesystem::exists(options.responses_path)) {
    for (auto& r : load_responses(options.responses_path)) done.insert(std::move(r.id));
  }
  std::vector<const Instruction*> pending;
  CollectSummary summary;
  for (const auto& instr : instructions) {
    if (done.count(instr.id)) {
      ++summary.skipped;
    } else {
      pending.push_back(&instr);
    }
  }

  std::ofstream responses(options.responses_path, std::ios::app | std::ios::binary);
  if (!responses) throw ConfigError("cannot open " + options.responses_path);
  std::ofstream errors;
  if (!options.errors_path.empty()) {
    errors.open(options.errors_path, std::ios::trunc | std::ios::binary);
    if (!errors) throw ConfigError("cannot open " + options.errors_path);
  }

  std::mutex io;
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    httplib::Client client(target.origin);
    client.set_connection_timeout(endpoint.timeout_s);
    client.set_read_timeout(endpoint.timeout_s);
    client.set_write_timeout(endpoint.timeout_s);
    for (std::size_t i = next++; i < pending.size(); i = next++) {
      const Instruction& instr = *pending[i];
      const Outcome outcome = request_one(client, target, endpoint, credential, instr, options);
      std::lock_guard lock(io);
      if (outcome.ok) {
        responses << response_to_json({instr.id, outcome.text, outcome.latency_ms}).dump() << '\n';
        responses.flush();
        ++summary.completed;
      } else {
        if (errors.is_open()) {
          errors << json{{"id", instr.id}, {"error", outcome.text}, {"attempts", outcome.attempts}}.dump()
                 << '\n';
          errors.flush();
        }
        ++summary.failed;
      }
    }
  };
  const auto workers = std::min<std::size_t>(endpoint.concurrency, std::max<std::size_t>(pending.size(), 1));
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(work);
  pool.clear();
  return summary;
}

}  // namespace lexeval
