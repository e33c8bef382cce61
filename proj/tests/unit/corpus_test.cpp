// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "promptalign/corpus.hpp"
#include "promptalign/rng.hpp"
#include "promptalign/taxonomy.hpp"
#include "support/random_records.hpp"

namespace promptalign::corpus {
namespace {

namespace fs = std::filesystem;

fs::path TempFile(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "promptalign_corpus";
  fs::create_directories(dir);
  return dir / name;
}

TEST(CorpusRoundTripTest, ThousandGeneratedRecords) {
  const auto g = promptalign::testing::GeneratedRecords(2026);
  const auto& prompts = g.prompts;
  const auto& triplets = g.triplets;
  const auto& bench = g.bench;
  const auto& verdicts = g.verdicts;
  auto round_trip = [](const auto& records, const std::string& name) {
    using T = typename std::decay_t<decltype(records)>::value_type;
    const auto path = TempFile(name);
    EXPECT_EQ(WriteStream(path, records), records.size());
    const auto back = ReadAllStrict<T>(path);
    ASSERT_EQ(back.size(), records.size());
    for (std::size_t i = 0; i < back.size(); ++i) EXPECT_EQ(back[i], records[i]) << name << " " << i;
  };
  round_trip(prompts, "prompts.jsonl");
  round_trip(triplets, "triplets.jsonl");
  round_trip(bench, "bench.jsonl");
  round_trip(verdicts, "verdicts.jsonl");
}

TEST(CorpusReadTest, BadLinesReportedAndReadingContinues) {
  const auto path = TempFile("mixed.jsonl");
  {
    std::ofstream out(path);
    out << R"({"id":"a","prompt":"A dog.","language":"en","keypoint_ids":["counting"]})" << "\n";
    out << "\n";
    out << R"({"id":"b","prompt":"A cat.","language":"en","keypoint_ids":["telepathy"]})" << "\n";
    out << "{broken\n";
    out << R"({"id":"c","prompt":"Two cats.","language":"zh","keypoint_ids":["size"]})" << "\n";
  }
  const auto results = ReadStream<BenchmarkRecord>(path);
  ASSERT_EQ(results.size(), 4u);
  EXPECT_TRUE(results[0].ok());
  EXPECT_FALSE(results[1].ok());
  EXPECT_EQ(results[1].error->line, 3u);
  EXPECT_EQ(results[1].error->field, "keypoint_ids");
  EXPECT_FALSE(results[2].ok());
  EXPECT_EQ(results[2].error->line, 4u);
  EXPECT_TRUE(results[3].ok());
  EXPECT_THROW(ReadAllStrict<BenchmarkRecord>(path), Error);
}

TEST(CorpusWriteTest, InvalidTripletRejectedBeforeWrite) {
  SftTriplet t;
  t.user_prompt.id = "u";
  t.user_prompt.text = "x";
  t.cot = "c";
  t.candidates = {"a", "b"};
  t.selected_index = 2;
  t.reprompt = "a";
  const auto path = TempFile("rejected.jsonl");
  fs::remove(path);
  const std::vector<SftTriplet> v = {t};
  EXPECT_THROW(WriteStream(path, v), Error);
  EXPECT_FALSE(fs::exists(path));
}

TEST(CorpusStatsTest, SplitAndHistograms) {
  std::vector<BenchmarkRecord> recs;
  for (int i = 0; i < 3; ++i) recs.push_back({"e" + std::to_string(i), "A dog.", Language::kEn, {"counting"}, {}});
  recs.push_back({"z", "一只猫。", Language::kZh, {"counting", "size"}, {}});
  const auto items = ToStatsItems(recs);
  const auto r = DatasetStats(items);
  EXPECT_EQ(r.total, 4u);
  EXPECT_DOUBLE_EQ(r.language_percent.at(Language::kEn), 75.0);
  EXPECT_EQ(r.density_histogram.at(1), 3u);
  EXPECT_EQ(r.density_histogram.at(2), 1u);
  EXPECT_EQ(DensityMode(r.density_histogram), 1u);
  const auto m = Cooccurrence(recs, 24);
  EXPECT_EQ(m.keypoints[0], "counting");
  EXPECT_EQ(m.counts[0][0], 4u);
  EXPECT_EQ(m.keypoints[1], "size");
  EXPECT_EQ(m.counts[0][1], 1u);
}

}  // namespace
}  // namespace promptalign::corpus
