// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "promptalign/error.hpp"
#include "promptalign/grpo.hpp"
#include "support/grpo_reference.hpp"

namespace promptalign::grpo {
namespace {

using promptalign::testing::RandomInstance;
using promptalign::testing::ReferenceLoss;

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::kUnknownKeyPoint;
}

TEST(AdvantagesTest, Examples) {
  GrpoConfig cfg;
  const std::vector<double> flat(8, 0.7);
  for (double a : Advantages(flat, cfg)) EXPECT_EQ(a, 0.0);
  const std::vector<double> two = {2.0, 0.0};
  EXPECT_EQ(Advantages(two, cfg), (std::vector<double>{1.0, -1.0}));

  const std::vector<double> r = {1, 0, 0, 1, 0, 0, 1, 0};
  // mean 3/8, population variance 3/8 * 5/8.
  const double sd = std::sqrt(15.0 / 64.0);
  const auto adv = Advantages(r, cfg);
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double want = r[i] == 1.0 ? 0.625 / sd : -0.375 / sd;
    EXPECT_NEAR(adv[i], want, 1e-12);
  }
  EXPECT_NEAR(adv[0], 1.2910, 1e-4);
  EXPECT_NEAR(adv[1], -0.7746, 1e-4);
}

TEST(AdvantagesTest, GroupTooSmall) {
  const std::vector<double> one = {1.0};
  EXPECT_EQ(CodeOf([&] { Advantages(one, GrpoConfig{}); }), ErrorCode::kGroupTooSmall);
}

TEST(AdvantagesTest, AffineInvarianceMeanZeroAndOrder) {
  Rng rng(11);
  GrpoConfig cfg;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = static_cast<std::size_t>(rng.UniformInt(2, 16));
    std::vector<double> r(n);
    for (double& v : r) v = rng.Uniform();
    const double a = 0.01 + rng.Uniform() * 10.0;
    const double b = rng.Uniform() * 20.0 - 10.0;
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = a * r[i] + b;
    const auto ar = Advantages(r, cfg);
    const auto as = Advantages(s, cfg);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(ar[i], as[i], 1e-9);
      mean += ar[i];
      for (std::size_t j = 0; j < n; ++j) {
        if (r[i] > r[j]) EXPECT_GT(ar[i], ar[j]);
      }
    }
    EXPECT_NEAR(mean / static_cast<double>(n), 0.0, 1e-9);
  }
}

TEST(KlDivergenceTest, Examples) {
  const std::vector<double> p = {0.5, 0.5};
  const std::vector<double> q = {0.25, 0.75};
  EXPECT_EQ(KlDivergence(p, p), 0.0);
  EXPECT_NEAR(KlDivergence(p, q), 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0), 1e-12);
  EXPECT_NEAR(KlDivergence(p, q), 0.14384, 1e-5);
  const std::vector<double> zero = {1.0, 0.0};
  EXPECT_EQ(CodeOf([&] { KlDivergence(p, zero); }), ErrorCode::kSupportMismatch);
  const std::vector<double> three = {0.2, 0.3, 0.5};
  EXPECT_EQ(CodeOf([&] { KlDivergence(p, three); }), ErrorCode::kSupportMismatch);
}

TEST(KlDivergenceTest, NonNegative) {
  Rng rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> a(5), b(5);
    double sa = 0, sb = 0;
    for (int i = 0; i < 5; ++i) {
      a[i] = rng.Uniform() + 1e-3;
      b[i] = rng.Uniform() + 1e-3;
      sa += a[i];
      sb += b[i];
    }
    for (int i = 0; i < 5; ++i) {
      a[i] /= sa;
      b[i] /= sb;
    }
    EXPECT_GE(KlDivergence(a, b), 0.0);
    EXPECT_EQ(KlDivergence(a, a), 0.0);
  }
}

TEST(ToyPolicyTest, SoftmaxNormalised) {
  ToyPolicy p({"a", "b", "c"}, {0.3, -1.2, 2.0});
  double total = 0.0;
  for (double v : p.Probabilities()) {
    EXPECT_GT(v, 0.0);
    total += v;
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_EQ(p.Greedy(), 2u);
}

TEST(SurrogateLossTest, OnPolicyLossIsZeroWithoutKl) {
  ToyPolicy pi({"a", "b", "c", "d"}, {0.1, 0.2, -0.3, 0.4});
  RolloutGroup g;
  g.actions = {0, 1, 2, 3, 0, 1, 2, 3};
  g.rewards = {1, 0, 0.5, 1, 0, 0, 1, 0.25};
  for (auto a : g.actions) {
    g.old_logprobs.push_back(pi.LogProb(a));
    g.candidates.push_back(pi.actions()[a]);
  }
  GrpoConfig cfg;
  cfg.kl_coef = 0.0;
  EXPECT_NEAR(SurrogateLoss(g, pi, pi, cfg).loss, 0.0, 1e-12);
}

TEST(SurrogateLossTest, SingleActionHasZeroGradient) {
  ToyPolicy pi({"only"});
  RolloutGroup g;
  g.actions = {0, 0, 0};
  g.rewards = {1, 0, 0.5};
  g.old_logprobs = {0.0, 0.0, 0.0};
  g.candidates = {"only", "only", "only"};
  GrpoConfig cfg;
  cfg.kl_coef = 0.0;
  EXPECT_EQ(SurrogateLoss(g, pi, pi, cfg).gradient, std::vector<double>{0.0});
}

TEST(SurrogateLossTest, MatchesReferenceAndFiniteDifferences) {
  Rng rng(2024);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto in = RandomInstance(rng);
    std::vector<std::string> names;
    for (std::size_t j = 0; j < in.logits.size(); ++j) names.push_back("a" + std::to_string(j));
    ToyPolicy pi(names, in.logits);
    ToyPolicy ref(names, in.ref_logits);
    RolloutGroup g;
    g.actions = in.actions;
    g.rewards = in.rewards;
    g.old_logprobs = in.old_logprobs;
    g.candidates.assign(in.actions.size(), "x");
    GrpoConfig cfg;
    cfg.kl_coef = in.beta;
    cfg.clip_epsilon = in.clip;
    const auto out = SurrogateLoss(g, pi, ref, cfg);
    EXPECT_NEAR(out.loss, ReferenceLoss(in, in.logits), 1e-12);
    const double h = 1e-5;
    for (std::size_t j = 0; j < in.logits.size(); ++j) {
      auto up = in.logits;
      auto down = in.logits;
      up[j] += h;
      down[j] -= h;
      const double fd = (ReferenceLoss(in, up) - ReferenceLoss(in, down)) / (2 * h);
      const double denom = std::max({std::abs(fd), std::abs(out.gradient[j]), 1e-8});
      const double rel = std::abs(fd - out.gradient[j]) / denom;
      worst = std::max(worst, rel);
      EXPECT_LT(rel, 1e-4) << "trial " << trial << " coord " << j << " fd " << fd
                           << " analytic " << out.gradient[j];
    }
  }
  RecordProperty("worst_relative_error", std::to_string(worst));
}

TEST(SurrogateLossTest, ShapeAndSupportErrors) {
  ToyPolicy pi({"a", "b"});
  ToyPolicy other({"a", "c"});
  RolloutGroup g;
  g.actions = {0, 1};
  g.rewards = {1, 0};
  g.old_logprobs = {-0.69, -0.69};
  GrpoConfig cfg;
  EXPECT_EQ(CodeOf([&] { SurrogateLoss(g, pi, other, cfg); }), ErrorCode::kSupportMismatch);
  g.old_logprobs.pop_back();
  EXPECT_EQ(CodeOf([&] { SurrogateLoss(g, pi, pi, cfg); }), ErrorCode::kShapeMismatch);
}

TEST(UpdateTest, Arithmetic) {
  GrpoConfig cfg;
  cfg.learning_rate = 1.0;
  ToyPolicy p({"a", "b"});
  const std::vector<double> g = {1.0, 0.0};
  EXPECT_EQ(Update(p, g, cfg).logits(), (std::vector<double>{-1.0, 0.0}));
  const std::vector<double> zero = {0.0, 0.0};
  EXPECT_EQ(Update(p, zero, cfg), p);
  cfg.learning_rate = 0.25;
  ToyPolicy q = p;
  for (int step = 1; step <= 8; ++step) {
    q = Update(q, g, cfg);
    EXPECT_DOUBLE_EQ(q.logits()[0], -0.25 * step);
  }
  const std::vector<double> bad = {1.0};
  EXPECT_EQ(CodeOf([&] { Update(p, bad, cfg); }), ErrorCode::kShapeMismatch);
}

TEST(TrainTest, BanditConverges) {
  GrpoConfig cfg;
  cfg.seed = 1;
  BanditEnv env(4, 2);
  const auto result = Train(env, cfg);
  ASSERT_EQ(result.history.size(), 500u);
  EXPECT_GT(result.policy[0].Probabilities()[2], 0.9);
  EXPECT_GE(result.history.back().mean_reward, result.history.front().mean_reward);
}

TEST(TrainTest, StrongKlAnchorsToReference) {
  GrpoConfig cfg;
  cfg.seed = 1;
  cfg.kl_coef = 10.0;
  BanditEnv env(4, 2);
  const auto result = Train(env, cfg);
  EXPECT_LT(TotalVariation(result.policy[0].Probabilities(), result.reference[0].Probabilities()),
            0.05);
}

class ZeroEnv : public RewardEnv {
 public:
  std::size_t NumPrompts() const override { return 3; }
  std::vector<std::string> Actions() const override { return {"a", "b", "c"}; }
  double Reward(std::size_t, std::size_t, std::uint64_t) const override { return 0.0; }
};

TEST(TrainTest, ZeroRewardLeavesPolicyUnchanged) {
  GrpoConfig cfg;
  cfg.steps = 20;
  const auto result = Train(ZeroEnv{}, cfg);
  EXPECT_EQ(result.policy, result.reference);
}

TEST(TrainTest, Reproducible) {
  GrpoConfig cfg;
  cfg.steps = 50;
  cfg.seed = 9;
  const auto a = Train(BanditEnv{}, cfg);
  const auto b = Train(BanditEnv{}, cfg);
  EXPECT_EQ(a.policy, b.policy);
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    EXPECT_EQ(ToJson(a.history[i]).dump(), ToJson(b.history[i]).dump());
  }
}

TEST(GrpoConfigTest, DefaultsAndValidation) {
  GrpoConfig cfg;
  EXPECT_EQ(cfg.group_size, 8u);
  EXPECT_EQ(cfg.kl_coef, 0.001);
  EXPECT_EQ(cfg.batch_size, 64u);
  EXPECT_EQ(cfg.clip_epsilon, 0.2);
  EXPECT_EQ(GrpoConfig::ForEndpoint().learning_rate, 1e-6);
  EXPECT_EQ(GrpoConfigFromJson(ToJson(cfg)), cfg);
  cfg.group_size = 1;
  EXPECT_EQ(CodeOf([&] { cfg.Validate(); }), ErrorCode::kInvalidConfig);
  EXPECT_EQ(CodeOf([&] { GrpoConfigFromJson(Json{{"bogus", 1}}); }), ErrorCode::kInvalidConfig);
}

}  // namespace
}  // namespace promptalign::grpo
