// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "promptalign/error.hpp"
#include "promptalign/evaluator.hpp"
#include "promptalign/rng.hpp"
#include "support/keypoint_cases.hpp"

namespace promptalign::evaluator {
namespace {

using promptalign::testing::KeypointCases;
using promptalign::testing::PromptFor;

Verdict MakeVerdict(const std::string& record, const std::string& kp, bool pass) {
  Verdict v;
  v.record_id = record;
  v.keypoint_id = kp;
  v.pass = pass;
  v.score = pass ? 1.0 : 0.0;
  v.judge_id = "test";
  return v;
}

class KeypointOracleTest : public ::testing::TestWithParam<std::size_t> {};

TEST_P(KeypointOracleTest, PassAndFailScenes) {
  const auto c = KeypointCases()[GetParam()];
  const auto& kp = taxonomy::Lookup(c.keypoint);
  const auto prompt = PromptFor(c);
  const auto good = JudgeKeypoint(c.pass_scene, prompt, kp);
  EXPECT_TRUE(good.pass) << c.keypoint << ": " << good.rationale;
  EXPECT_EQ(good.score, 1.0);
  const auto bad = JudgeKeypoint(c.fail_scene, prompt, kp);
  EXPECT_FALSE(bad.pass) << c.keypoint;
  EXPECT_EQ(bad.score, 0.0);
  EXPECT_FALSE(Check(good).has_value());
  EXPECT_FALSE(Check(bad).has_value());
  if (kp.criteria == Criteria::kTicAndSi) {
    EXPECT_TRUE(good.si_pass.has_value());
  } else {
    EXPECT_FALSE(good.si_pass.has_value());
  }
}

INSTANTIATE_TEST_SUITE_P(AllKeypoints, KeypointOracleTest, ::testing::Range<std::size_t>(0, 24),
                         [](const auto& info) {
                           auto name = KeypointCases()[info.param].keypoint;
                           for (auto& ch : name) {
                             if (ch == '-') ch = '_';
                           }
                           return name;
                         });

TEST(KeypointOracleCoverage, CasesCoverTaxonomyInOrder) {
  const auto cases = KeypointCases();
  const auto reg = taxonomy::Registry();
  ASSERT_EQ(cases.size(), reg.size());
  for (std::size_t i = 0; i < reg.size(); ++i) EXPECT_EQ(cases[i].keypoint, reg[i].id);
}

TEST(JudgeKeypointTest, EmptySceneFailsEveryKeypoint) {
  for (const auto& c : KeypointCases()) {
    const auto v = JudgeKeypoint(SceneGraph{}, PromptFor(c), taxonomy::Lookup(c.keypoint));
    EXPECT_FALSE(v.pass) << c.keypoint;
    EXPECT_EQ(v.score, 0.0);
  }
}

TEST(JudgeKeypointTest, UncheckablePromptFailsWithRationale) {
  UserPrompt p;
  p.id = "x";
  p.text = "A quiet afternoon.";
  const auto v = JudgeKeypoint(SceneGraph{}, p, taxonomy::Lookup("counting"));
  EXPECT_FALSE(v.pass);
  EXPECT_NE(v.rationale.find("no checkable"), std::string::npos);
}

TEST(AggregateTest, MeanOfScores) {
  std::vector<Verdict> four;
  for (bool pass : {true, true, false, true}) four.push_back(MakeVerdict("r", "counting", pass));
  EXPECT_EQ(Aggregate(four).reward, 0.75);
  std::vector<Verdict> eight;
  for (int s : {1, 1, 0, 0, 1, 0, 0, 0}) eight.push_back(MakeVerdict("r", "size", s == 1));
  EXPECT_EQ(Aggregate(eight).reward, 0.375);
  std::vector<Verdict> all(4, MakeVerdict("r", "size", true));
  EXPECT_EQ(Aggregate(all).reward, 1.0);
}

TEST(AggregateTest, Errors) {
  std::vector<Verdict> none;
  try {
    Aggregate(none);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyVerdicts);
  }
  std::vector<Verdict> mixed = {MakeVerdict("a", "size", true), MakeVerdict("b", "size", true)};
  EXPECT_THROW(Aggregate(mixed), Error);
}

TEST(AggregateTest, Monotonicity) {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Verdict> v;
    const auto n = rng.UniformInt(1, 10);
    for (int i = 0; i < n; ++i) v.push_back(MakeVerdict("r", "size", rng.Uniform() < 0.5));
    const double base = Aggregate(v).reward;
    auto added = v;
    added.push_back(MakeVerdict("r", "size", true));
    EXPECT_GE(Aggregate(added).reward, base);
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].pass) continue;
      auto flipped = v;
      flipped[i] = MakeVerdict("r", "size", false);
      EXPECT_LE(Aggregate(flipped).reward, base);
    }
  }
}

TEST(MockT2iTest, DeterministicPerSeed) {
  for (std::uint64_t seed : {1u, 2u, 99u}) {
    const auto a = MockT2i("Some dogs next to a red ball.", seed);
    const auto b = MockT2i("Some dogs next to a red ball.", seed);
    EXPECT_EQ(ToJson(a).dump(), ToJson(b).dump());
  }
  std::set<int> counts;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    counts.insert(MockT2i("Some dogs.", seed).FindEntity("dog")->count);
  }
  EXPECT_GT(counts.size(), 1u);
}

TEST(MockT2iTest, ExplicitPhrasesAlwaysHonored) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto s = MockT2i("exactly four dogs", seed, {1.0});
    ASSERT_NE(s.FindEntity("dog"), nullptr);
    EXPECT_EQ(s.FindEntity("dog")->count, 4);
  }
}

TEST(MockT2iTest, ContainmentExample) {
  const auto s = MockT2i("a cup full of soda water", 3, {0.0});
  ASSERT_EQ(s.relations.size(), 1u);
  EXPECT_EQ(s.relations[0].kind, RelationKind::kContainment);
  EXPECT_EQ(s.relations[0].subject, "cup");
  EXPECT_EQ(s.relations[0].object, "soda water");
}

TEST(MockT2iTest, EmptyTextGivesEmptyScene) {
  EXPECT_TRUE(MockT2i("", 1).empty());
  EXPECT_TRUE(MockT2i("   ", 1).empty());
}

TEST(MockT2iTest, FullFailureRateBreaksEveryCanonicalPrompt) {
  for (const auto& c : KeypointCases()) {
    const auto prompt = PromptFor(c);
    const auto scene = MockT2i(c.prompt, 5, {1.0});
    EXPECT_EQ(Evaluate(scene, prompt).reward, 0.0) << c.keypoint;
  }
}

TEST(EndToEndTest, ExplicitRepromptScoresOneForAnySeed) {
  for (const auto& c : KeypointCases()) {
    const auto prompt = PromptFor(c);
    const std::string reprompt = "Clearly, " + c.prompt;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto scene = MockT2i(reprompt, seed, {1.0});
      EXPECT_EQ(Evaluate(scene, prompt).reward, 1.0) << c.keypoint << " seed " << seed;
    }
  }
}

TEST(EndToEndTest, FaithfulRenderPassesAllCanonicalPrompts) {
  for (const auto& c : KeypointCases()) {
    const auto scene = MockT2i(c.prompt, 1, {0.0});
    EXPECT_EQ(Evaluate(scene, PromptFor(c)).reward, 1.0) << c.keypoint;
  }
}

}  // namespace
}  // namespace promptalign::evaluator
