// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

// Group-relative policy optimization over a finite rewrite-action space.
//
//   A_i  = (r_i - mean r) / std_pop(r), all zero when std_pop < advantage_epsilon
//   rho_i = exp(logpi(a_i) - old_logprob_i)
//   loss = -(1/N) sum_i min(rho_i A_i, clip(rho_i, 1-eps, 1+eps) A_i)
//          + beta * KL(pi || pi_ref)
//
// Everything is double precision; the gradient is exact w.r.t. the logits.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "promptalign/records.hpp"
#include "promptalign/rng.hpp"

namespace promptalign::grpo {

inline constexpr double kToyLearningRate = 0.05;
inline constexpr double kEndpointLearningRate = 1e-6;

struct GrpoConfig {
  std::size_t group_size = 8;
  double kl_coef = 0.001;
  double learning_rate = kToyLearningRate;
  double clip_epsilon = 0.2;
  std::size_t batch_size = 64;
  double advantage_epsilon = 1e-8;
  std::uint64_t seed = 0;
  // Update steps for the standalone trainer; epochs for pipeline runs.
  std::size_t steps = 500;
  std::size_t epochs = 1;

  // Defaults for runs that emit data for an external trainer.
  static GrpoConfig ForEndpoint();

  // Throws Error{kInvalidConfig} on the first violated bound.
  void Validate() const;

  bool operator==(const GrpoConfig&) const = default;
};

Json ToJson(const GrpoConfig& cfg);
// Missing keys keep their defaults; unknown keys are rejected.
GrpoConfig GrpoConfigFromJson(const Json& j);

struct RolloutGroup {
  UserPrompt prompt;
  std::vector<std::string> candidates;
  // Toy-action index per candidate; empty for endpoint policies.
  std::vector<std::size_t> actions;
  std::vector<double> rewards;
  // Empty when the policy backend exposes no log-probabilities.
  std::vector<double> old_logprobs;

  std::size_t size() const { return candidates.size(); }
};

// Throws GroupTooSmall when fewer than two rewards.
std::vector<double> Advantages(std::span<const double> rewards, const GrpoConfig& cfg);

// KL(p || q) in nats. Throws SupportMismatch on size mismatch or q_i = 0
// where p_i > 0.
double KlDivergence(std::span<const double> p, std::span<const double> q);

class ToyPolicy {
 public:
  ToyPolicy() = default;
  // Logits default to zero (uniform).
  explicit ToyPolicy(std::vector<std::string> actions, std::vector<double> logits = {});

  std::size_t size() const { return actions_.size(); }
  const std::vector<std::string>& actions() const { return actions_; }
  const std::vector<double>& logits() const { return logits_; }
  double temperature() const { return temperature_; }

  std::vector<double> Probabilities() const;
  std::vector<double> LogProbabilities() const;
  double LogProb(std::size_t action) const;

  // Inverse-CDF draw from the seeded generator.
  std::size_t Sample(Rng& rng) const;
  // Lowest index among the maximal logits.
  std::size_t Greedy() const;

  // Same actions, same order.
  bool SameSupport(const ToyPolicy& other) const { return actions_ == other.actions_; }

  bool operator==(const ToyPolicy&) const = default;

 private:
  std::vector<std::string> actions_;
  std::vector<double> logits_;
  double temperature_ = 1.0;
};

Json ToJson(const ToyPolicy& p);
ToyPolicy ToyPolicyFromJson(const Json& j);

struct LossResult {
  double loss = 0.0;
  std::vector<double> gradient;  // d loss / d logits
  double kl = 0.0;               // KL(policy || ref)
  std::vector<double> advantages;
};

// Requires group.actions and group.old_logprobs. Throws GroupTooSmall,
// SupportMismatch (policy/ref differ), ShapeMismatch (group fields).
LossResult SurrogateLoss(const RolloutGroup& group, const ToyPolicy& policy,
                         const ToyPolicy& ref_policy, const GrpoConfig& cfg);

// logits - learning_rate * gradient. Throws ShapeMismatch.
ToyPolicy Update(const ToyPolicy& policy, std::span<const double> gradient,
                 const GrpoConfig& cfg);

// A deterministic reward source over a fixed prompt set. Prompts map to
// policy heads, so one trainer can hold a separate softmax per prompt class.
class RewardEnv {
 public:
  virtual ~RewardEnv() = default;
  virtual std::size_t NumPrompts() const = 0;
  virtual std::size_t NumHeads() const { return 1; }
  virtual std::size_t HeadOf(std::size_t /*prompt*/) const { return 0; }
  virtual std::vector<std::string> Actions() const = 0;
  // Must be a pure function of its arguments.
  virtual double Reward(std::size_t prompt, std::size_t action, std::uint64_t seed) const = 0;
};

// One prompt; `best` pays 1, every other arm pays 0.
class BanditEnv : public RewardEnv {
 public:
  explicit BanditEnv(std::size_t arms = 4, std::size_t best = 2);
  std::size_t NumPrompts() const override { return 1; }
  std::vector<std::string> Actions() const override;
  double Reward(std::size_t prompt, std::size_t action, std::uint64_t seed) const override;

 private:
  std::size_t arms_;
  std::size_t best_;
};

struct StepStats {
  std::size_t step = 0;
  double mean_reward = 0.0;
  double kl = 0.0;
  double loss = 0.0;
};

Json ToJson(const StepStats& s);

struct TrainResult {
  std::vector<ToyPolicy> policy;     // one per head
  std::vector<ToyPolicy> reference;  // the initial policy, frozen
  std::vector<StepStats> history;    // one entry per step
};

// cfg.steps updates; each step rolls out cfg.batch_size groups of
// cfg.group_size actions, prompts taken round-robin.
TrainResult Train(const RewardEnv& env, const GrpoConfig& cfg);

double TotalVariation(std::span<const double> p, std::span<const double> q);

}  // namespace promptalign::grpo
