// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "promptalign/config.hpp"

namespace promptalign::cli {

struct Globals {
  std::optional<std::string> config_path;
  std::optional<std::string> log_level;

  config::GlobalConfig Load() const;
};

// Each Register* adds one top-level command whose callback is stored in
// `run`; main() invokes it after parsing.
using Action = std::function<int()>;

void RegisterTaxonomy(CLI::App& app, const Globals& g, Action& run);
void RegisterCorpus(CLI::App& app, const Globals& g, Action& run);
void RegisterCurate(CLI::App& app, const Globals& g, Action& run);
void RegisterAnnotate(CLI::App& app, const Globals& g, Action& run);
void RegisterGrpo(CLI::App& app, const Globals& g, Action& run);
void RegisterAlign(CLI::App& app, const Globals& g, Action& run);
void RegisterBench(CLI::App& app, const Globals& g, Action& run);
void RegisterConfig(CLI::App& app, const Globals& g, Action& run);

}  // namespace promptalign::cli
