// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#include "promptalign/log.hpp"

#include <mutex>

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "promptalign/error.hpp"

namespace promptalign::log {

std::shared_ptr<spdlog::logger> Logger() {
  static std::once_flag once;
  static std::shared_ptr<spdlog::logger> logger;
  std::call_once(once, [] {
    logger = spdlog::get("promptalign");
    if (!logger) {
      logger = std::make_shared<spdlog::logger>(
          "promptalign", std::make_shared<spdlog::sinks::stderr_sink_mt>());
      logger->set_level(spdlog::level::warn);
      spdlog::register_logger(logger);
    }
  });
  return logger;
}

void SetLevel(std::string_view level) {
  const auto parsed = spdlog::level::from_str(std::string(level));
  // from_str maps anything unrecognised to off.
  if (parsed == spdlog::level::off && level != "off") {
    throw Error(ErrorCode::kInvalidConfig, "unknown log level " + std::string(level));
  }
  Logger()->set_level(parsed);
}

std::string Redact(std::string_view text, std::initializer_list<std::string_view> secrets) {
  std::string out(text);
  for (auto secret : secrets) {
    if (secret.empty()) continue;
    std::size_t pos = 0;
    while ((pos = out.find(secret, pos)) != std::string::npos) {
      out.replace(pos, secret.size(), "***");
      pos += 3;
    }
  }
  return out;
}

}  // namespace promptalign::log
