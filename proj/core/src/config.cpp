// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#include "promptalign/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "promptalign/error.hpp"

namespace promptalign::config {

namespace {

[[noreturn]] void Bad(const std::string& path, const std::string& why) {
  throw Error(ErrorCode::kInvalidConfig, path + ": " + why);
}

Json OptString(const std::optional<std::string>& s) { return s ? Json(*s) : Json(nullptr); }

Json OptEndpoint(const std::optional<endpoint::EndpointConfig>& e) {
  return e ? endpoint::ToJson(*e) : Json(nullptr);
}

// Layout used to type-check the file and to enumerate override variables:
// null sections take the shape of their non-null form.
Json Schema() {
  Json s = Defaults();
  for (auto& [name, v] : s["backends"].items()) v = endpoint::ToJson(endpoint::EndpointConfig{});
  return s;
}

bool SameKind(const Json& schema, const Json& value) {
  if (value.is_null()) return true;
  if (schema.is_null()) return value.is_string();
  if (schema.is_number_float()) return value.is_number();
  if (schema.is_number_unsigned()) return value.is_number_unsigned();
  if (schema.is_number_integer()) return value.is_number_integer();
  if (schema.is_array()) return value.is_array();
  return schema.type() == value.type();
}

void CheckAgainst(const Json& schema, const Json& value, const std::string& path) {
  if (!value.is_object()) Bad(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& [key, v] : value.items()) {
    const auto p = path.empty() ? key : path + "." + key;
    if (!schema.contains(key)) Bad(p, "unknown key");
    const auto& sv = schema[key];
    if (sv.is_object() && !v.is_null()) {
      CheckAgainst(sv, v, p);
    } else if (!sv.is_object() && !SameKind(sv, v)) {
      Bad(p, std::string("expected ") + sv.type_name() + ", got " + v.type_name());
    }
  }
}

void MergeInto(Json& base, const Json& over, const Json& schema) {
  for (const auto& [key, v] : over.items()) {
    if (schema[key].is_object() && v.is_object()) {
      if (!base[key].is_object()) base[key] = schema[key];
      MergeInto(base[key], v, schema[key]);
    } else {
      base[key] = v;
    }
  }
}

Json ParseScalar(const Json& schema, const std::string& raw, const std::string& path) {
  try {
    if (schema.is_boolean()) {
      if (raw == "true" || raw == "1") return true;
      if (raw == "false" || raw == "0") return false;
      Bad(path, "expected true or false");
    }
    if (schema.is_number_unsigned()) {
      if (raw.empty() || raw[0] == '-') Bad(path, "expected a non-negative integer");
      return static_cast<std::uint64_t>(std::stoull(raw));
    }
    if (schema.is_number_integer()) return static_cast<std::int64_t>(std::stoll(raw));
    if (schema.is_number_float()) return std::stod(raw);
    if (schema.is_array()) return Json::parse(raw);
  } catch (const std::logic_error&) {
    Bad(path, "cannot parse '" + raw + "'");
  } catch (const Json::exception&) {
    Bad(path, "expected a JSON array");
  }
  return raw;
}

void ApplyEnv(Json& target, const Json& schema, const std::string& path, const EnvLookup& env) {
  for (const auto& [key, sv] : schema.items()) {
    const auto p = path.empty() ? key : path + "." + key;
    if (sv.is_object()) {
      Json sub = target.contains(key) && target[key].is_object() ? target[key] : Json::object();
      const bool had = target.contains(key) && target[key].is_object();
      ApplyEnv(sub, sv, p, env);
      if (had || !sub.empty()) target[key] = sub;
      continue;
    }
    if (auto v = env(EnvName(p))) target[key] = ParseScalar(sv, *v, p);
  }
}

template <typename T>
T Get(const Json& j, const char* key, const std::string& section, T fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  try {
    return j[key].get<T>();
  } catch (const Json::exception&) {
    Bad(section + "." + key, "wrong type");
  }
}

std::optional<std::string> GetOpt(const Json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<std::string>();
}

std::optional<endpoint::EndpointConfig> EndpointAt(const Json& backends, const char* name) {
  if (!backends.contains(name) || backends[name].is_null()) return std::nullopt;
  try {
    auto cfg = endpoint::EndpointConfigFromJson(backends[name]);
    cfg.Validate();
    return cfg;
  } catch (const Error& e) {
    Bad(std::string("backends.") + name, e.what());
  }
}

}  // namespace

std::string EnvName(const std::string& dotted_path) {
  std::string out = "PROMPTALIGN_";
  for (char c : dotted_path) {
    out.push_back(c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return out;
}

Json ToJson(const GlobalConfig& c) {
  Json curation{{"k", c.curation.k},
                {"max_chars", c.curation.max_chars},
                {"workers", c.curation.workers},
                {"malformed_retries", c.curation.malformed_retries},
                {"filter_mode", c.curation.filter_mode},
                {"filter", curation::ToJson(c.curation.filter)},
                {"templates_dir", OptString(c.curation.templates_dir)}};
  return Json{
      {"paths", {{"work_dir", c.paths.work_dir}, {"cache_dir", c.paths.cache_dir}}},
      {"logging", {{"level", c.log_level}}},
      {"backends",
       {{"policy", OptEndpoint(c.backends.policy)},
        {"t2i", OptEndpoint(c.backends.t2i)},
        {"judge", OptEndpoint(c.backends.judge)},
        {"teacher", OptEndpoint(c.backends.teacher)},
        {"reviewer", OptEndpoint(c.backends.reviewer)}}},
      {"grpo", grpo::ToJson(c.grpo)},
      {"curation", curation},
      {"server",
       {{"host", c.server.host},
        {"port", c.server.port},
        {"store", c.server.store},
        {"ui_dir", OptString(c.server.ui_dir)},
        {"lease_seconds", c.server.lease_seconds}}},
      {"run",
       {{"hermetic", c.run.hermetic},
        {"workers", c.run.workers},
        {"prompts", OptString(c.run.prompts)},
        {"synthetic_prompts", c.run.synthetic_prompts},
        {"mock_failure_rate", c.run.mock_failure_rate},
        {"checkpoint", OptString(c.run.checkpoint)},
        {"preferences", OptString(c.run.preferences)},
        {"metrics", OptString(c.run.metrics)}}}};
}

Json Defaults() { return ToJson(GlobalConfig{}); }

GlobalConfig FromJson(const Json& j) {
  CheckAgainst(Schema(), j, "");
  Json full = Defaults();
  MergeInto(full, j, Schema());
  GlobalConfig c;
  const auto& paths = full["paths"];
  c.paths.work_dir = Get<std::string>(paths, "work_dir", "paths", c.paths.work_dir);
  c.paths.cache_dir = Get<std::string>(paths, "cache_dir", "paths", c.paths.cache_dir);
  c.log_level = Get<std::string>(full["logging"], "level", "logging", c.log_level);
  static const std::set<std::string> kLevels = {"trace", "debug", "info", "warn",
                                                 "error", "critical", "off"};
  if (!kLevels.count(c.log_level)) Bad("logging.level", "unknown level " + c.log_level);
  const auto& b = full["backends"];
  c.backends.policy = EndpointAt(b, "policy");
  c.backends.t2i = EndpointAt(b, "t2i");
  c.backends.judge = EndpointAt(b, "judge");
  c.backends.teacher = EndpointAt(b, "teacher");
  c.backends.reviewer = EndpointAt(b, "reviewer");
  try {
    c.grpo = grpo::GrpoConfigFromJson(full["grpo"]);
    c.grpo.Validate();
    c.curation.filter = curation::FilterRulesFromJson(full["curation"]["filter"]);
  } catch (const Error& e) {
    throw Error(ErrorCode::kInvalidConfig, e.what());
  }
  const auto& cu = full["curation"];
  c.curation.k = Get<std::size_t>(cu, "k", "curation", c.curation.k);
  c.curation.max_chars = Get<std::size_t>(cu, "max_chars", "curation", c.curation.max_chars);
  c.curation.workers = Get<std::size_t>(cu, "workers", "curation", c.curation.workers);
  c.curation.malformed_retries = Get<int>(cu, "malformed_retries", "curation", c.curation.malformed_retries);
  c.curation.filter_mode = Get<std::string>(cu, "filter_mode", "curation", c.curation.filter_mode);
  c.curation.templates_dir = GetOpt(cu, "templates_dir");
  if (c.curation.k < 2) Bad("curation.k", "must be at least 2");
  if (c.curation.filter_mode != "rules" && c.curation.filter_mode != "llm") {
    Bad("curation.filter_mode", "must be rules or llm");
  }
  const auto& sv = full["server"];
  c.server.host = Get<std::string>(sv, "host", "server", c.server.host);
  c.server.port = Get<int>(sv, "port", "server", c.server.port);
  c.server.store = Get<std::string>(sv, "store", "server", c.server.store);
  c.server.ui_dir = GetOpt(sv, "ui_dir");
  c.server.lease_seconds = Get<std::size_t>(sv, "lease_seconds", "server", c.server.lease_seconds);
  if (c.server.port < 0 || c.server.port > 65535) Bad("server.port", "out of range");
  if (c.server.lease_seconds == 0) Bad("server.lease_seconds", "must be positive");
  const auto& r = full["run"];
  c.run.hermetic = Get<bool>(r, "hermetic", "run", c.run.hermetic);
  c.run.workers = Get<std::size_t>(r, "workers", "run", c.run.workers);
  c.run.prompts = GetOpt(r, "prompts");
  c.run.synthetic_prompts = Get<std::size_t>(r, "synthetic_prompts", "run", c.run.synthetic_prompts);
  c.run.mock_failure_rate = Get<double>(r, "mock_failure_rate", "run", c.run.mock_failure_rate);
  c.run.checkpoint = GetOpt(r, "checkpoint");
  c.run.preferences = GetOpt(r, "preferences");
  c.run.metrics = GetOpt(r, "metrics");
  if (!(c.run.mock_failure_rate >= 0.0 && c.run.mock_failure_rate <= 1.0)) {
    Bad("run.mock_failure_rate", "must lie in [0, 1]");
  }
  if (c.run.workers == 0) Bad("run.workers", "must be positive");
  return c;
}

EnvLookup ProcessEnv() {
  return [](const std::string& name) -> std::optional<std::string> {
    if (const char* v = std::getenv(name.c_str())) return std::string(v);
    return std::nullopt;
  };
}

GlobalConfig Load(const std::optional<std::string>& path, const EnvLookup& env) {
  Json j = Json::object();
  if (path) {
    std::ifstream in(*path);
    if (!in) throw Error(ErrorCode::kIoError, "cannot open config " + *path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      j = Json::parse(ss.str());
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kInvalidConfig, *path + ": not valid JSON: " + e.what());
    }
    CheckAgainst(Schema(), j, "");
  }
  if (env) ApplyEnv(j, Schema(), "", env);
  return FromJson(j);
}

}  // namespace promptalign::config
