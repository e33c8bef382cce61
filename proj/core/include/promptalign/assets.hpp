// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace promptalign::assets {

// Built-in copy of a shipped template, by file name.
std::optional<std::string> Builtin(std::string_view name);
std::vector<std::string> BuiltinNames();

// Reads `override_path` when given, else the built-in asset. Throws
// Error{kIoError} when neither exists.
std::string Load(std::string_view name, const std::optional<std::filesystem::path>& override_path);

// Substitutes {{key}} placeholders. Unknown placeholders are left as is.
std::string Render(std::string_view tmpl,
                   const std::vector<std::pair<std::string, std::string>>& values);

}  // namespace promptalign::assets
