// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

// Online loop: policy backend -> N reprompts -> T2I backend -> judge backend
// -> group rewards -> update (toy policy) or preference records (endpoint
// policy).

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "promptalign/endpoint.hpp"
#include "promptalign/evaluator.hpp"
#include "promptalign/grpo.hpp"
#include "promptalign/remote_judge.hpp"

namespace promptalign::orchestrator {

struct Image {
  std::string ref;
  // Set by local renderers; the oracle judge needs it.
  std::optional<SceneGraph> scene;
};

struct PolicySample {
  std::string text;
  std::optional<std::size_t> action;
  std::optional<double> logprob;
};

class PolicyBackend {
 public:
  virtual ~PolicyBackend() = default;
  virtual bool local() const = 0;
  virtual std::vector<PolicySample> Sample(const UserPrompt& prompt, std::size_t n,
                                           std::uint64_t seed) const = 0;
};

class T2iBackend {
 public:
  virtual ~T2iBackend() = default;
  virtual bool local() const = 0;
  virtual Image Generate(const std::string& text, std::uint64_t seed) const = 0;
};

class JudgeBackend {
 public:
  virtual ~JudgeBackend() = default;
  virtual bool local() const = 0;
  virtual evaluator::RewardReport Judge(const Image& image, const UserPrompt& prompt) const = 0;
};

// One softmax head per super-category over the rewrite edits. A prompt uses
// the head of its first keypoint.
class ToyPolicyBackend : public PolicyBackend {
 public:
  explicit ToyPolicyBackend(bool greedy = false);
  ToyPolicyBackend(std::vector<grpo::ToyPolicy> heads, bool greedy = false);

  bool local() const override { return true; }
  std::vector<PolicySample> Sample(const UserPrompt& prompt, std::size_t n,
                                   std::uint64_t seed) const override;

  static std::size_t HeadOf(const UserPrompt& prompt);

  const std::vector<grpo::ToyPolicy>& heads() const { return heads_; }
  const std::vector<grpo::ToyPolicy>& reference() const { return reference_; }
  void Restore(std::vector<grpo::ToyPolicy> heads, std::vector<grpo::ToyPolicy> reference);

  struct UpdateStats {
    double loss = 0.0;
    double kl = 0.0;
  };
  // One averaged gradient step per head over the groups routed to it.
  UpdateStats Update(const std::vector<grpo::RolloutGroup>& groups, const grpo::GrpoConfig& cfg);

 private:
  std::vector<grpo::ToyPolicy> heads_;
  std::vector<grpo::ToyPolicy> reference_;
  bool greedy_;
};

class MockT2iBackend : public T2iBackend {
 public:
  explicit MockT2iBackend(evaluator::MockT2iOptions options = {}) : options_(options) {}
  bool local() const override { return true; }
  Image Generate(const std::string& text, std::uint64_t seed) const override;

 private:
  evaluator::MockT2iOptions options_;
};

class OracleJudgeBackend : public JudgeBackend {
 public:
  bool local() const override { return true; }
  // Throws InvalidArgument when the image carries no scene.
  evaluator::RewardReport Judge(const Image& image, const UserPrompt& prompt) const override;
};

// Reprompts from a chat endpoint; log-probabilities are the token sums when
// the endpoint returns them.
class ChatPolicyBackend : public PolicyBackend {
 public:
  ChatPolicyBackend(endpoint::EndpointConfig cfg,
                    std::optional<std::filesystem::path> template_path = std::nullopt);
  bool local() const override { return false; }
  std::vector<PolicySample> Sample(const UserPrompt& prompt, std::size_t n,
                                   std::uint64_t seed) const override;

 private:
  endpoint::EndpointConfig cfg_;
  std::string template_;
};

// POST {prompt, seed} -> {image_ref[, scene]}.
class HttpT2iBackend : public T2iBackend {
 public:
  explicit HttpT2iBackend(endpoint::EndpointConfig cfg) : cfg_(std::move(cfg)) {}
  bool local() const override { return false; }
  Image Generate(const std::string& text, std::uint64_t seed) const override;

 private:
  endpoint::EndpointConfig cfg_;
};

class RemoteJudgeBackend : public JudgeBackend {
 public:
  explicit RemoteJudgeBackend(evaluator::RemoteJudgeOptions options)
      : options_(std::move(options)) {}
  bool local() const override { return false; }
  evaluator::RewardReport Judge(const Image& image, const UserPrompt& prompt) const override;

 private:
  evaluator::RemoteJudgeOptions options_;
};

struct BackendSet {
  std::shared_ptr<PolicyBackend> policy;
  std::shared_ptr<T2iBackend> t2i;
  std::shared_ptr<JudgeBackend> judge;

  // Throws InvalidConfig when a backend is missing.
  void Validate() const;
  bool hermetic() const;

  static BackendSet Hermetic(evaluator::MockT2iOptions t2i = {}, bool greedy = false);
};

// N candidates, N images, N rewards in candidate order, or an exception; a
// partial group is never returned. `seed` fixes every draw of the group.
grpo::RolloutGroup Rollout(const UserPrompt& prompt, const BackendSet& backends,
                           const grpo::GrpoConfig& cfg, std::uint64_t seed);

struct RunOptions {
  // Prompts of one batch rolled out concurrently.
  std::size_t workers = 4;
  // Written after every batch; loaded on construction when it exists.
  std::optional<std::filesystem::path> checkpoint;
  // Endpoint mode: one JSONL record per group.
  std::optional<std::filesystem::path> preferences;
  // Stop (as if killed) after this many batches in this process.
  std::optional<std::size_t> stop_after_batches;
};

struct EpochMetrics {
  std::size_t epoch = 0;
  std::size_t batches = 0;
  std::size_t groups = 0;
  std::size_t aborted = 0;   // failed group attempts
  std::size_t requeued = 0;  // prompts retried after a failure
  std::size_t dropped = 0;   // prompts that failed twice
  std::size_t updates = 0;
  double mean_reward = 0.0;
  double reward_std = 0.0;
  double mean_loss = 0.0;
  double mean_kl = 0.0;

  bool operator==(const EpochMetrics&) const = default;
};

Json ToJson(const EpochMetrics& m);

struct RunResult {
  std::vector<EpochMetrics> epochs;
  bool finished = false;
};

class Pipeline {
 public:
  // Throws InvalidConfig; restores the checkpoint when one exists.
  Pipeline(BackendSet backends, grpo::GrpoConfig cfg, RunOptions options = {});

  // Runs the remaining epochs of cfg.epochs over `prompts` (shuffled per
  // epoch by seed). Throws InvalidArgument on an empty set before any side
  // effect.
  RunResult Run(const std::vector<UserPrompt>& prompts);

  const BackendSet& backends() const { return backends_; }

 private:
  struct State;
  void Save(const State& state) const;

  BackendSet backends_;
  grpo::GrpoConfig cfg_;
  RunOptions options_;
  std::shared_ptr<State> state_;
};

// The hermetic rollout as a standalone reward source: actions are the toy
// rewrite edits, the reward is the oracle score of the mock render.
class MockPipelineEnv : public grpo::RewardEnv {
 public:
  MockPipelineEnv(std::vector<UserPrompt> prompts, evaluator::MockT2iOptions t2i = {});
  std::size_t NumPrompts() const override { return prompts_.size(); }
  std::size_t NumHeads() const override { return kNumSuperCategories; }
  std::size_t HeadOf(std::size_t prompt) const override;
  std::vector<std::string> Actions() const override;
  double Reward(std::size_t prompt, std::size_t action, std::uint64_t seed) const override;

 private:
  std::vector<UserPrompt> prompts_;
  evaluator::MockT2iOptions t2i_;
};

// Prompts whose keypoints the grammar can check and the rewrite edits can
// make explicit: a faithful render scores 1 and a fully explicit reprompt
// scores 1 at any failure rate.
std::vector<UserPrompt> SyntheticPrompts(std::size_t count, std::uint64_t seed);

}  // namespace promptalign::orchestrator
