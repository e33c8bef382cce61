// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "promptalign/records.hpp"
#include "promptalign/scene.hpp"
#include "promptalign/scene_parser.hpp"
#include "promptalign/taxonomy.hpp"

namespace promptalign::evaluator {

inline constexpr std::string_view kOracleJudgeId = "oracle";

struct RewardReport {
  std::string record_id;
  std::vector<Verdict> verdicts;
  double reward = 0.0;
};

Json ToJson(const RewardReport& report);

// Facts of `requirement` a keypoint checks. Empty when the prompt states
// nothing the grammar can check for that keypoint.
std::vector<const grammar::Fact*> RequirementsFor(const grammar::ParsedPrompt& requirement,
                                                  const KeyPoint& kp);

// Rule-based verdict with binary score. The prompt text is parsed with the
// same grammar the mock renderer uses.
Verdict JudgeKeypoint(const SceneGraph& scene, const UserPrompt& prompt, const KeyPoint& kp);

// Same, with the prompt already parsed (the hot path in training loops).
Verdict JudgeKeypoint(const SceneGraph& scene, const grammar::ParsedPrompt& requirement,
                      const std::string& record_id, const KeyPoint& kp);

// r = mean score over the given verdicts. Throws EmptyVerdicts on an empty
// list and InvalidArgument when record ids differ.
RewardReport Aggregate(std::span<const Verdict> verdicts);

// Judges every annotated keypoint of the prompt and aggregates.
RewardReport Evaluate(const SceneGraph& scene, const UserPrompt& prompt);
RewardReport Evaluate(const SceneGraph& scene, const grammar::ParsedPrompt& requirement,
                      const UserPrompt& prompt);

struct MockT2iOptions {
  // Probability that a fact not stated explicitly is rendered wrongly.
  double failure_rate = 0.5;
};

// Deterministic text-to-image stand-in: parses the text, renders explicit
// facts faithfully and degrades each other fact with `failure_rate`.
SceneGraph MockT2i(std::string_view text, std::uint64_t seed,
                   const MockT2iOptions& options = {});

}  // namespace promptalign::evaluator
