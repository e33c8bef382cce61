// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

// Process-wide settings: one JSON document with fixed sections, overridable
// per leaf through PROMPTALIGN_<SECTION>_<KEY> environment variables.

#pragma once

#include <functional>
#include <optional>
#include <string>

#include "promptalign/curation.hpp"
#include "promptalign/endpoint.hpp"
#include "promptalign/grpo.hpp"

namespace promptalign::config {

struct Paths {
  std::string work_dir = ".";
  std::string cache_dir = ".promptalign/cache";
};

struct Backends {
  std::optional<endpoint::EndpointConfig> policy;
  std::optional<endpoint::EndpointConfig> t2i;
  std::optional<endpoint::EndpointConfig> judge;
  std::optional<endpoint::EndpointConfig> teacher;
  std::optional<endpoint::EndpointConfig> reviewer;
};

struct CurationSection {
  std::size_t k = curation::kDefaultCandidates;
  std::size_t max_chars = 120;
  std::size_t workers = 4;
  int malformed_retries = 2;
  std::string filter_mode = "rules";  // rules | llm
  curation::FilterRules filter;
  std::optional<std::string> templates_dir;
};

struct ServerSection {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string store = "tasks";
  std::optional<std::string> ui_dir;
  std::size_t lease_seconds = 600;
};

struct RunSection {
  bool hermetic = true;
  std::size_t workers = 4;
  std::optional<std::string> prompts;  // JSONL of UserPrompt; synthetic when unset
  std::size_t synthetic_prompts = 200;
  double mock_failure_rate = 0.5;
  std::optional<std::string> checkpoint;
  std::optional<std::string> preferences;
  std::optional<std::string> metrics;
};

struct GlobalConfig {
  Paths paths;
  std::string log_level = "warn";
  Backends backends;
  grpo::GrpoConfig grpo;
  CurationSection curation;
  ServerSection server;
  RunSection run;
};

Json ToJson(const GlobalConfig& c);
// Unknown keys and wrong types throw Error{kInvalidConfig} naming the path.
GlobalConfig FromJson(const Json& j);
Json Defaults();

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
EnvLookup ProcessEnv();

// Defaults, then the file (if any), then environment overrides.
GlobalConfig Load(const std::optional<std::string>& path, const EnvLookup& env = ProcessEnv());

// Name of the variable that overrides `dotted_path` ("grpo.seed" ->
// "PROMPTALIGN_GRPO_SEED").
std::string EnvName(const std::string& dotted_path);

}  // namespace promptalign::config
