// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

// HTTP transport for remote policy, teacher, judge and image endpoints.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "promptalign/records.hpp"

namespace promptalign::endpoint {

struct EndpointConfig {
  std::string base_url;  // scheme://host[:port]
  std::string path = "/v1/chat/completions";
  std::string model;
  // Name of the environment variable holding the bearer token. The token
  // itself is never stored in a config.
  std::string auth_env;
  double timeout_s = 60.0;
  int max_retries = 3;
  int backoff_initial_ms = 250;
  double backoff_multiplier = 2.0;
  int max_in_flight = 4;

  // Throws Error{kInvalidConfig}.
  void Validate() const;

  bool operator==(const EndpointConfig&) const = default;
};

Json ToJson(const EndpointConfig& cfg);
// Unknown keys are rejected.
EndpointConfig EndpointConfigFromJson(const Json& j);

// Value of the auth env var, empty when unset or not configured.
std::string ResolveToken(const EndpointConfig& cfg);

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatRequest {
  std::vector<ChatMessage> messages;
  double temperature = 1.0;
  std::optional<int> max_tokens;
  bool logprobs = false;
  std::optional<std::uint64_t> seed;
};

struct ChatResponse {
  std::string text;
  std::optional<std::vector<double>> token_logprobs;
  int attempts = 0;
};

Json ToWire(const ChatRequest& request, const std::string& model);

// One chat-completions call. Transient failures (no connection, 5xx, 429)
// retry with exponential backoff; 429 honours Retry-After. Throws
// TransportError, or Error{kRateLimited} when the last attempt was a 429.
ChatResponse ChatComplete(const ChatRequest& request, const EndpointConfig& cfg);

struct JsonResponse {
  Json body;
  int attempts = 0;
};

// POST a JSON body to cfg.base_url + path with the same retry, limiter and
// logging behaviour as ChatComplete.
JsonResponse PostJson(const EndpointConfig& cfg, const std::string& path, const Json& body);

// GET raw bytes.
std::string GetBytes(const EndpointConfig& cfg, const std::string& path);

}  // namespace promptalign::endpoint
