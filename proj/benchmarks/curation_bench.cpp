// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include <filesystem>

#include "promptalign/corpus.hpp"
#include "promptalign/curation.hpp"
#include "promptalign/orchestrator.hpp"

namespace promptalign::curation {
namespace {

void BM_TemplateGenerateAndFilter(benchmark::State& state) {
  const auto prompts = orchestrator::SyntheticPrompts(32, 9);
  GenerateOptions opts;
  opts.workers = 1;
  const FilterRules rules;
  std::size_t i = 0;
  for (auto _ : state) {
    const auto set = GenerateCandidates(prompts[i % prompts.size()], opts, i);
    benchmark::DoNotOptimize(AutoFilter(set, rules));
    ++i;
  }
}
BENCHMARK(BM_TemplateGenerateAndFilter);

void BM_CheckCandidate(benchmark::State& state) {
  UserPrompt p;
  p.id = "p";
  p.text = "A portrait of Marie Curie reading a letter beside three glass flasks.";
  const std::string candidate =
      "Clearly, a portrait of Marie Curie reading a letter beside exactly three glass flasks. "
      "Soft window light, muted palette, shallow depth of field.";
  const FilterRules rules;
  for (auto _ : state) benchmark::DoNotOptimize(CheckCandidate(p, candidate, rules));
}
BENCHMARK(BM_CheckCandidate);

void BM_JsonlRoundTrip(benchmark::State& state) {
  const auto prompts = orchestrator::SyntheticPrompts(static_cast<std::size_t>(state.range(0)), 1);
  const auto path = std::filesystem::temp_directory_path() / "promptalign_bench_roundtrip.jsonl";
  for (auto _ : state) {
    corpus::WriteStream(path, prompts);
    benchmark::DoNotOptimize(corpus::ReadAllStrict<UserPrompt>(path));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
  std::filesystem::remove(path);
}
BENCHMARK(BM_JsonlRoundTrip)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace promptalign::curation
