// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "promptalign/grpo.hpp"
#include "promptalign/rng.hpp"

namespace promptalign::grpo {
namespace {

void BM_Advantages(benchmark::State& state) {
  Rng rng(1);
  std::vector<double> r(static_cast<std::size_t>(state.range(0)));
  for (double& v : r) v = rng.Uniform();
  const GrpoConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(Advantages(r, cfg));
}
BENCHMARK(BM_Advantages)->Arg(8)->Arg(64);

void BM_SurrogateLoss(benchmark::State& state) {
  const std::vector<std::string> names = {"a", "b", "c", "d", "e", "f"};
  const ToyPolicy pi(names, {0.1, -0.2, 0.3, 0.0, 0.5, -0.4});
  const ToyPolicy ref(names, std::vector<double>(6, 0.0));
  Rng rng(2);
  RolloutGroup g;
  for (int i = 0; i < 8; ++i) {
    const auto a = static_cast<std::size_t>(rng.UniformInt(0, 5));
    g.actions.push_back(a);
    g.candidates.push_back(names[a]);
    g.rewards.push_back(rng.Uniform());
    g.old_logprobs.push_back(pi.LogProb(a));
  }
  const GrpoConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(SurrogateLoss(g, pi, ref, cfg));
}
BENCHMARK(BM_SurrogateLoss);

void BM_TrainBandit(benchmark::State& state) {
  GrpoConfig cfg;
  cfg.steps = static_cast<std::size_t>(state.range(0));
  const BanditEnv env;
  for (auto _ : state) benchmark::DoNotOptimize(Train(env, cfg));
}
BENCHMARK(BM_TrainBandit)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace promptalign::grpo
