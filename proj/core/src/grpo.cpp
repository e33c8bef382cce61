// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#include "promptalign/grpo.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "promptalign/error.hpp"

namespace promptalign::grpo {

GrpoConfig GrpoConfig::ForEndpoint() {
  GrpoConfig cfg;
  cfg.learning_rate = kEndpointLearningRate;
  return cfg;
}

void GrpoConfig::Validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::kInvalidConfig, what); };
  if (group_size < 2) bad("grpo.group_size must be >= 2");
  if (!(kl_coef >= 0.0)) bad("grpo.kl_coef must be >= 0");
  if (!(learning_rate > 0.0)) bad("grpo.learning_rate must be > 0");
  if (!(clip_epsilon > 0.0)) bad("grpo.clip_epsilon must be > 0");
  if (batch_size < 1) bad("grpo.batch_size must be >= 1");
  if (!(advantage_epsilon > 0.0)) bad("grpo.advantage_epsilon must be > 0");
}

Json ToJson(const GrpoConfig& c) {
  return Json{{"group_size", c.group_size},       {"kl_coef", c.kl_coef},
              {"learning_rate", c.learning_rate}, {"clip_epsilon", c.clip_epsilon},
              {"batch_size", c.batch_size},       {"advantage_epsilon", c.advantage_epsilon},
              {"seed", c.seed},                   {"steps", c.steps},
              {"epochs", c.epochs}};
}

GrpoConfig GrpoConfigFromJson(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidConfig, "grpo config must be an object");
  GrpoConfig c;
  static const std::set<std::string> kKnown = {
      "group_size", "kl_coef", "learning_rate", "clip_epsilon", "batch_size",
      "advantage_epsilon", "seed", "steps", "epochs"};
  for (const auto& [key, value] : j.items()) {
    if (!kKnown.count(key)) throw Error(ErrorCode::kInvalidConfig, "unknown key grpo." + key);
  }
  try {
    c.group_size = j.value("group_size", c.group_size);
    c.kl_coef = j.value("kl_coef", c.kl_coef);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.clip_epsilon = j.value("clip_epsilon", c.clip_epsilon);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.advantage_epsilon = j.value("advantage_epsilon", c.advantage_epsilon);
    c.seed = j.value("seed", c.seed);
    c.steps = j.value("steps", c.steps);
    c.epochs = j.value("epochs", c.epochs);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("grpo: ") + e.what());
  }
  return c;
}

std::vector<double> Advantages(std::span<const double> rewards, const GrpoConfig& cfg) {
  const std::size_t n = rewards.size();
  if (n < 2) throw Error(ErrorCode::kGroupTooSmall, "a group needs at least two rewards");
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  const double std_pop = std::sqrt(var / static_cast<double>(n));
  std::vector<double> adv(n, 0.0);
  if (std_pop < cfg.advantage_epsilon) return adv;
  const double denom = std::max(std_pop, cfg.advantage_epsilon);
  for (std::size_t i = 0; i < n; ++i) adv[i] = (rewards[i] - mean) / denom;
  return adv;
}

double KlDivergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw Error(ErrorCode::kSupportMismatch, "distributions differ in size");
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) throw Error(ErrorCode::kSupportMismatch, "q is zero where p is not");
    kl += p[i] * (std::log(p[i]) - std::log(q[i]));
  }
  return std::max(kl, 0.0);
}

double TotalVariation(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw Error(ErrorCode::kSupportMismatch, "distributions differ in size");
  }
  double tv = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) tv += std::abs(p[i] - q[i]);
  return 0.5 * tv;
}

ToyPolicy::ToyPolicy(std::vector<std::string> actions, std::vector<double> logits)
    : actions_(std::move(actions)), logits_(std::move(logits)) {
  if (actions_.empty()) throw Error(ErrorCode::kInvalidArgument, "empty action library");
  if (logits_.empty()) logits_.assign(actions_.size(), 0.0);
  if (logits_.size() != actions_.size()) {
    throw Error(ErrorCode::kShapeMismatch, "one logit per action required");
  }
}

std::vector<double> ToyPolicy::LogProbabilities() const {
  const double m = *std::max_element(logits_.begin(), logits_.end()) / temperature_;
  double sum = 0.0;
  for (double z : logits_) sum += std::exp(z / temperature_ - m);
  const double lse = m + std::log(sum);
  std::vector<double> out(logits_.size());
  for (std::size_t i = 0; i < logits_.size(); ++i) out[i] = logits_[i] / temperature_ - lse;
  return out;
}

std::vector<double> ToyPolicy::Probabilities() const {
  auto lp = LogProbabilities();
  for (double& v : lp) v = std::exp(v);
  return lp;
}

double ToyPolicy::LogProb(std::size_t action) const {
  if (action >= size()) throw Error(ErrorCode::kShapeMismatch, "action out of range");
  return LogProbabilities()[action];
}

std::size_t ToyPolicy::Sample(Rng& rng) const {
  const auto probs = Probabilities();
  const double u = rng.Uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  return probs.size() - 1;
}

std::size_t ToyPolicy::Greedy() const {
  return static_cast<std::size_t>(std::max_element(logits_.begin(), logits_.end()) -
                                  logits_.begin());
}

Json ToJson(const ToyPolicy& p) {
  return Json{{"actions", p.actions()}, {"logits", p.logits()}, {"temperature", p.temperature()}};
}

ToyPolicy ToyPolicyFromJson(const Json& j) {
  return ToyPolicy(j.at("actions").get<std::vector<std::string>>(),
                   j.at("logits").get<std::vector<double>>());
}

LossResult SurrogateLoss(const RolloutGroup& group, const ToyPolicy& policy,
                         const ToyPolicy& ref_policy, const GrpoConfig& cfg) {
  if (!policy.SameSupport(ref_policy)) {
    throw Error(ErrorCode::kSupportMismatch, "policy and reference use different actions");
  }
  const std::size_t n = group.rewards.size();
  if (group.actions.size() != n || group.old_logprobs.size() != n) {
    throw Error(ErrorCode::kShapeMismatch, "group needs one action and old logprob per reward");
  }
  LossResult out;
  out.advantages = Advantages(group.rewards, cfg);

  const std::size_t k = policy.size();
  const auto logp = policy.LogProbabilities();
  const auto ref_logp = ref_policy.LogProbabilities();
  std::vector<double> prob(k);
  for (std::size_t j = 0; j < k; ++j) prob[j] = std::exp(logp[j]);

  out.gradient.assign(k, 0.0);
  double objective = 0.0;
  const double lo = 1.0 - cfg.clip_epsilon;
  const double hi = 1.0 + cfg.clip_epsilon;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = group.actions[i];
    if (a >= k) throw Error(ErrorCode::kShapeMismatch, "action out of range");
    const double adv = out.advantages[i];
    const double rho = std::exp(logp[a] - group.old_logprobs[i]);
    const double clipped = std::clamp(rho, lo, hi);
    const double unclipped_term = rho * adv;
    const double clipped_term = clipped * adv;
    objective += std::min(unclipped_term, clipped_term);
    // The clipped branch is constant in the logits once rho is outside the
    // trust region; otherwise d(rho)/dz = rho (e_a - pi).
    const bool inside = rho >= lo && rho <= hi;
    if (inside || unclipped_term < clipped_term) {
      for (std::size_t j = 0; j < k; ++j) {
        const double indicator = j == a ? 1.0 : 0.0;
        out.gradient[j] -= adv * rho * (indicator - prob[j]) / static_cast<double>(n);
      }
    }
  }

  double kl = 0.0;
  for (std::size_t j = 0; j < k; ++j) kl += prob[j] * (logp[j] - ref_logp[j]);
  out.kl = kl;
  if (cfg.kl_coef != 0.0) {
    for (std::size_t j = 0; j < k; ++j) {
      out.gradient[j] += cfg.kl_coef * prob[j] * ((logp[j] - ref_logp[j]) - kl);
    }
  }
  out.loss = -objective / static_cast<double>(n) + cfg.kl_coef * kl;
  return out;
}

ToyPolicy Update(const ToyPolicy& policy, std::span<const double> gradient,
                 const GrpoConfig& cfg) {
  if (gradient.size() != policy.size()) {
    throw Error(ErrorCode::kShapeMismatch, "gradient size differs from the logit count");
  }
  std::vector<double> logits = policy.logits();
  for (std::size_t j = 0; j < logits.size(); ++j) logits[j] -= cfg.learning_rate * gradient[j];
  return ToyPolicy(policy.actions(), std::move(logits));
}

BanditEnv::BanditEnv(std::size_t arms, std::size_t best) : arms_(arms), best_(best) {
  if (arms_ == 0 || best_ >= arms_) {
    throw Error(ErrorCode::kInvalidArgument, "bandit needs best < arms");
  }
}

std::vector<std::string> BanditEnv::Actions() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < arms_; ++i) out.push_back("arm-" + std::to_string(i));
  return out;
}

double BanditEnv::Reward(std::size_t /*prompt*/, std::size_t action,
                         std::uint64_t /*seed*/) const {
  return action == best_ ? 1.0 : 0.0;
}

Json ToJson(const StepStats& s) {
  return Json{{"step", s.step}, {"mean_reward", s.mean_reward}, {"kl", s.kl}, {"loss", s.loss}};
}

TrainResult Train(const RewardEnv& env, const GrpoConfig& cfg) {
  cfg.Validate();
  if (env.NumPrompts() == 0) throw Error(ErrorCode::kEmptyCorpus, "environment has no prompts");
  TrainResult result;
  const auto actions = env.Actions();
  result.policy.assign(env.NumHeads(), ToyPolicy(actions));
  result.reference = result.policy;

  std::size_t cursor = 0;
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    std::vector<std::vector<double>> grads(env.NumHeads(),
                                           std::vector<double>(actions.size(), 0.0));
    StepStats stats;
    stats.step = step;
    double reward_sum = 0.0;
    for (std::size_t b = 0; b < cfg.batch_size; ++b) {
      const std::size_t prompt = cursor++ % env.NumPrompts();
      const std::size_t head = env.HeadOf(prompt);
      const auto& pi = result.policy[head];
      Rng rng(MixSeeds({cfg.seed, step, b}));
      RolloutGroup g;
      const auto logp = pi.LogProbabilities();
      for (std::size_t i = 0; i < cfg.group_size; ++i) {
        const auto a = pi.Sample(rng);
        g.actions.push_back(a);
        g.candidates.push_back(actions[a]);
        g.old_logprobs.push_back(logp[a]);
        g.rewards.push_back(env.Reward(prompt, a, MixSeeds({cfg.seed, step, b, i})));
        reward_sum += g.rewards.back();
      }
      const auto loss = SurrogateLoss(g, pi, result.reference[head], cfg);
      for (std::size_t j = 0; j < actions.size(); ++j) grads[head][j] += loss.gradient[j];
      stats.loss += loss.loss;
      stats.kl += loss.kl;
    }
    const double groups = static_cast<double>(cfg.batch_size);
    for (std::size_t h = 0; h < grads.size(); ++h) {
      for (double& v : grads[h]) v /= groups;
      result.policy[h] = Update(result.policy[h], grads[h], cfg);
    }
    stats.mean_reward = reward_sum / (groups * static_cast<double>(cfg.group_size));
    stats.loss /= groups;
    stats.kl /= groups;
    result.history.push_back(stats);
  }
  return result;
}

}  // namespace promptalign::grpo
