// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "promptalign/benchmark.hpp"
#include "promptalign/evaluator.hpp"
#include "promptalign/orchestrator.hpp"
#include "promptalign/scene_parser.hpp"

namespace promptalign {
namespace {

const std::vector<UserPrompt>& Prompts() {
  static const auto p = orchestrator::SyntheticPrompts(64, 5);
  return p;
}

void BM_ParsePrompt(::benchmark::State& state) {
  std::size_t i = 0;
  for (auto _ : state) {
    ::benchmark::DoNotOptimize(grammar::ParsePrompt(Prompts()[i++ % Prompts().size()].text));
  }
}
BENCHMARK(BM_ParsePrompt);

void BM_RenderAndJudge(::benchmark::State& state) {
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& p = Prompts()[i % Prompts().size()];
    const auto scene = evaluator::MockT2i(p.text, i++);
    ::benchmark::DoNotOptimize(evaluator::Evaluate(scene, p));
  }
}
BENCHMARK(BM_RenderAndJudge);

void BM_HermeticRollout(::benchmark::State& state) {
  const auto backends = orchestrator::BackendSet::Hermetic();
  const grpo::GrpoConfig cfg;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    ::benchmark::DoNotOptimize(
        orchestrator::Rollout(Prompts()[seed % Prompts().size()], backends, cfg, seed));
    ++seed;
  }
}
BENCHMARK(BM_HermeticRollout);

void BM_BenchmarkEvaluate(::benchmark::State& state) {
  std::vector<BenchmarkRecord> data;
  for (const auto& p : orchestrator::SyntheticPrompts(static_cast<std::size_t>(state.range(0)), 3)) {
    data.push_back({p.id, p.text, p.language, p.keypoint_ids, Json::object()});
  }
  const orchestrator::MockT2iBackend t2i;
  const orchestrator::OracleJudgeBackend judge;
  for (auto _ : state) ::benchmark::DoNotOptimize(promptalign::benchmark::Evaluate(data, t2i, judge));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BenchmarkEvaluate)->Arg(200)->Unit(::benchmark::kMillisecond);

}  // namespace
}  // namespace promptalign
