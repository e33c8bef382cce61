// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#include "promptalign/endpoint.hpp"

#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "promptalign/error.hpp"
#include "promptalign/log.hpp"

namespace promptalign::endpoint {

namespace {

// Counts outstanding requests per endpoint.
class Gate {
 public:
  explicit Gate(int limit) : limit_(limit) {}

  void Acquire() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return in_flight_ < limit_; });
    ++in_flight_;
  }

  void Release() {
    {
      std::lock_guard lock(mu_);
      --in_flight_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  int in_flight_ = 0;
  int limit_;
};

Gate& GateFor(const EndpointConfig& cfg) {
  static std::mutex mu;
  static std::map<std::string, std::unique_ptr<Gate>> gates;
  std::lock_guard lock(mu);
  auto key = cfg.base_url + "|" + std::to_string(cfg.max_in_flight);
  auto& slot = gates[key];
  if (!slot) slot = std::make_unique<Gate>(cfg.max_in_flight);
  return *slot;
}

struct GateHold {
  explicit GateHold(Gate& g) : gate(g) { gate.Acquire(); }
  ~GateHold() { gate.Release(); }
  Gate& gate;
};

struct RawResponse {
  int status = 0;
  std::string body;
  std::string content_type;
  int attempts = 0;
};

bool Transient(int status) { return status == 429 || status >= 500; }

RawResponse Send(const EndpointConfig& cfg, const std::string& method, const std::string& path,
                 const std::string& body) {
  cfg.Validate();
  const auto token = ResolveToken(cfg);
  auto logger = log::Logger();
  httplib::Client client(cfg.base_url);
  const auto timeout = std::chrono::duration<double>(cfg.timeout_s);
  client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  httplib::Headers headers;
  if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);

  Gate& gate = GateFor(cfg);
  int last_status = 0;
  std::string last_error;
  for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
    logger->debug("{} {}{} attempt={} auth={} body={}", method, cfg.base_url, path, attempt + 1,
                  token.empty() ? "none" : "Bearer ***", log::Redact(body, {token}));
    httplib::Result res;
    {
      GateHold hold(gate);
      res = method == "GET" ? client.Get(path, headers)
                            : client.Post(path, headers, body, "application/json");
    }
    double wait_ms = cfg.backoff_initial_ms * std::pow(cfg.backoff_multiplier, attempt);
    if (!res) {
      last_status = 0;
      last_error = httplib::to_string(res.error());
      logger->warn("{} {}{} failed: {}", method, cfg.base_url, path, last_error);
    } else {
      last_status = res->status;
      logger->debug("{} {}{} -> {} body={}", method, cfg.base_url, path, res->status,
                    log::Redact(res->body, {token}));
      if (res->status >= 200 && res->status < 300) {
        return {res->status, res->body, res->get_header_value("Content-Type"), attempt + 1};
      }
      last_error = "HTTP " + std::to_string(res->status);
      if (!Transient(res->status)) {
        throw TransportError(method + " " + cfg.base_url + path + ": " + last_error, false,
                             res->status);
      }
      if (res->status == 429 && res->has_header("Retry-After")) {
        char* end = nullptr;
        const auto header = res->get_header_value("Retry-After");
        const double secs = std::strtod(header.c_str(), &end);
        if (end != header.c_str() && secs >= 0) wait_ms = secs * 1000.0;
      }
    }
    if (attempt < cfg.max_retries) {
      std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(wait_ms));
    }
  }
  const auto what = method + " " + cfg.base_url + path + ": " + last_error + " after " +
                    std::to_string(cfg.max_retries + 1) + " attempts";
  if (last_status == 429) throw Error(ErrorCode::kRateLimited, what);
  throw TransportError(what, true, last_status);
}

Json ParseBody(const RawResponse& raw, const EndpointConfig& cfg) {
  try {
    return Json::parse(raw.body);
  } catch (const Json::exception&) {
    throw TransportError(cfg.base_url + ": response is not JSON", false, raw.status);
  }
}

}  // namespace

void EndpointConfig::Validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kInvalidConfig, msg); };
  if (base_url.empty()) fail("endpoint.base_url is empty");
  if (!(timeout_s > 0)) fail("endpoint.timeout_s must be > 0");
  if (max_retries < 0) fail("endpoint.max_retries must be >= 0");
  if (backoff_initial_ms < 0) fail("endpoint.backoff_initial_ms must be >= 0");
  if (backoff_multiplier < 1.0) fail("endpoint.backoff_multiplier must be >= 1");
  if (max_in_flight < 1) fail("endpoint.max_in_flight must be >= 1");
}

Json ToJson(const EndpointConfig& cfg) {
  return Json{{"base_url", cfg.base_url},
              {"path", cfg.path},
              {"model", cfg.model},
              {"auth_env", cfg.auth_env},
              {"timeout_s", cfg.timeout_s},
              {"max_retries", cfg.max_retries},
              {"backoff_initial_ms", cfg.backoff_initial_ms},
              {"backoff_multiplier", cfg.backoff_multiplier},
              {"max_in_flight", cfg.max_in_flight}};
}

EndpointConfig EndpointConfigFromJson(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidConfig, "endpoint must be an object");
  EndpointConfig cfg;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "base_url") cfg.base_url = value.get<std::string>();
      else if (key == "path") cfg.path = value.get<std::string>();
      else if (key == "model") cfg.model = value.get<std::string>();
      else if (key == "auth_env") cfg.auth_env = value.get<std::string>();
      else if (key == "timeout_s") cfg.timeout_s = value.get<double>();
      else if (key == "max_retries") cfg.max_retries = value.get<int>();
      else if (key == "backoff_initial_ms") cfg.backoff_initial_ms = value.get<int>();
      else if (key == "backoff_multiplier") cfg.backoff_multiplier = value.get<double>();
      else if (key == "max_in_flight") cfg.max_in_flight = value.get<int>();
      else throw Error(ErrorCode::kInvalidConfig, "unknown key " + key);
    } catch (const Json::exception&) {
      throw Error(ErrorCode::kInvalidConfig, "bad type for " + key);
    }
  }
  return cfg;
}

std::string ResolveToken(const EndpointConfig& cfg) {
  if (cfg.auth_env.empty()) return {};
  const char* v = std::getenv(cfg.auth_env.c_str());
  return v ? std::string(v) : std::string();
}

Json ToWire(const ChatRequest& request, const std::string& model) {
  Json messages = Json::array();
  for (const auto& m : request.messages) {
    messages.push_back({{"role", m.role}, {"content", m.content}});
  }
  Json j{{"model", model}, {"messages", messages}, {"temperature", request.temperature}};
  if (request.max_tokens) j["max_tokens"] = *request.max_tokens;
  if (request.logprobs) j["logprobs"] = true;
  if (request.seed) j["seed"] = *request.seed;
  return j;
}

ChatResponse ChatComplete(const ChatRequest& request, const EndpointConfig& cfg) {
  const auto raw = Send(cfg, "POST", cfg.path, ToWire(request, cfg.model).dump());
  const auto body = ParseBody(raw, cfg);
  ChatResponse out;
  out.attempts = raw.attempts;
  try {
    const auto& choice = body.at("choices").at(0);
    out.text = choice.at("message").at("content").get<std::string>();
    if (choice.contains("logprobs") && choice["logprobs"].is_object() &&
        choice["logprobs"].contains("content")) {
      std::vector<double> lps;
      for (const auto& t : choice["logprobs"]["content"]) lps.push_back(t.at("logprob").get<double>());
      out.token_logprobs = std::move(lps);
    }
  } catch (const Json::exception&) {
    throw TransportError(cfg.base_url + ": response lacks choices[0].message.content", false,
                         raw.status);
  }
  return out;
}

JsonResponse PostJson(const EndpointConfig& cfg, const std::string& path, const Json& body) {
  const auto raw = Send(cfg, "POST", path, body.dump());
  return {ParseBody(raw, cfg), raw.attempts};
}

std::string GetBytes(const EndpointConfig& cfg, const std::string& path) {
  return Send(cfg, "GET", path, "").body;
}

}  // namespace promptalign::endpoint
