// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

// Keypoint judging by a chat endpoint, one request per (image, keypoint).

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "promptalign/endpoint.hpp"
#include "promptalign/evaluator.hpp"

namespace promptalign::evaluator {

inline constexpr std::string_view kJudgeTemplate = "judge_keypoint.md";

struct RemoteJudgeOptions {
  endpoint::EndpointConfig endpoint;
  std::optional<std::filesystem::path> template_path;
  // Extra requests after a reply that does not parse.
  int malformed_retries = 2;
  std::string judge_id = "remote";
};

// Parses the <verdict>{...}</verdict> block of a judge reply. The verdict
// must name `kp`, carry a score in [0,1] and satisfy the Verdict
// invariants. Throws Error{kMalformedJudgment}.
Verdict ParseJudgment(std::string_view reply, const std::string& record_id, const KeyPoint& kp,
                      const std::string& judge_id);

Verdict RemoteJudgeKeypoint(const std::string& image_ref, const UserPrompt& prompt,
                            const KeyPoint& kp, const RemoteJudgeOptions& options);

RewardReport RemoteEvaluate(const std::string& image_ref, const UserPrompt& prompt,
                            const RemoteJudgeOptions& options);

}  // namespace promptalign::evaluator
