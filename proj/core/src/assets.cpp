// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#include "promptalign/assets.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "promptalign/error.hpp"

namespace promptalign::assets {

namespace detail {
const std::map<std::string, std::string>& Table();
}  // namespace detail

std::optional<std::string> Builtin(std::string_view name) {
  const auto& table = detail::Table();
  auto it = table.find(std::string(name));
  if (it == table.end()) return std::nullopt;
  return it->second;
}

std::vector<std::string> BuiltinNames() {
  std::vector<std::string> out;
  for (const auto& [name, body] : detail::Table()) out.push_back(name);
  return out;
}

std::string Load(std::string_view name,
                 const std::optional<std::filesystem::path>& override_path) {
  if (override_path) {
    std::ifstream in(*override_path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIoError, "cannot read " + override_path->string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
  auto body = Builtin(name);
  if (!body) throw Error(ErrorCode::kIoError, "no built-in asset " + std::string(name));
  return *body;
}

std::string Render(std::string_view tmpl,
                   const std::vector<std::pair<std::string, std::string>>& values) {
  std::string out(tmpl);
  for (const auto& [key, value] : values) {
    const std::string needle = "{{" + key + "}}";
    for (std::size_t pos = out.find(needle); pos != std::string::npos;
         pos = out.find(needle, pos + value.size())) {
      out.replace(pos, needle.size(), value);
    }
  }
  return out;
}

}  // namespace promptalign::assets
