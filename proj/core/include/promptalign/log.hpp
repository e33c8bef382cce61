// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>
#include <string_view>

#include <spdlog/logger.h>

namespace promptalign::log {

// The library-wide logger ("promptalign"), created on first use with a
// stderr sink at warn level.
std::shared_ptr<spdlog::logger> Logger();

// Accepts trace|debug|info|warn|error|critical|off. Throws
// Error{kInvalidConfig} otherwise.
void SetLevel(std::string_view level);

// Replaces every occurrence of each non-empty secret with "***".
std::string Redact(std::string_view text, std::initializer_list<std::string_view> secrets);

}  // namespace promptalign::log
