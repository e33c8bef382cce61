// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

// Per-keypoint accuracy runs, baseline/enhanced delta reports and dataset
// analytics.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "promptalign/corpus.hpp"
#include "promptalign/orchestrator.hpp"
#include "promptalign/records.hpp"

namespace promptalign::benchmark {

struct KeypointAccuracy {
  std::string keypoint_id;
  std::size_t n_instances = 0;
  std::size_t n_pass = 0;

  bool present() const { return n_instances > 0; }
  // nullopt when absent.
  std::optional<double> accuracy() const;
  bool operator==(const KeypointAccuracy&) const = default;
};

// One row per taxonomy keypoint, in taxonomy order.
struct AccuracyTable {
  std::vector<KeypointAccuracy> rows;
  std::size_t n_records = 0;
  std::size_t n_errored = 0;

  AccuracyTable();
  KeypointAccuracy& row(std::string_view keypoint_id);
  const KeypointAccuracy& row(std::string_view keypoint_id) const;
  // Unweighted mean over present keypoints; nullopt when none is present.
  std::optional<double> overall_mean() const;
  bool operator==(const AccuracyTable&) const = default;
};

Json ToJson(const AccuracyTable& t);
AccuracyTable AccuracyTableFromJson(const Json& j);  // throws SchemaError / UnknownKeyPoint

// Builds a table from (keypoint, pass) instances.
struct Instance {
  std::string keypoint_id;
  bool pass = false;
};
AccuracyTable Tabulate(std::span<const Instance> instances);

struct EvaluateOptions {
  std::size_t workers = 4;
  std::uint64_t seed = 0;
  // Rewrites each prompt before rendering; the baseline renders it as is.
  const orchestrator::PolicyBackend* rewriter = nullptr;
};

struct EvaluateResult {
  AccuracyTable table;
  std::vector<evaluator::RewardReport> reports;  // dataset order, errored records omitted
  std::vector<std::string> errored_ids;
};

// Validates the whole dataset first (Error{kUnknownKeyPoint} or
// kSchemaViolation). Records whose backends throw are counted as errored and
// left out of every accuracy.
EvaluateResult Evaluate(std::span<const BenchmarkRecord> dataset,
                        const orchestrator::T2iBackend& generator,
                        const orchestrator::JudgeBackend& judge,
                        const EvaluateOptions& options = {});

// Always renders the prompt rewritten by one fixed edit.
class FixedEditPolicy : public orchestrator::PolicyBackend {
 public:
  explicit FixedEditPolicy(std::string edit);
  bool local() const override { return true; }
  std::vector<orchestrator::PolicySample> Sample(const UserPrompt& prompt, std::size_t n,
                                                 std::uint64_t seed) const override;

 private:
  std::string edit_;
};

struct DeltaRow {
  std::string keypoint_id;
  double baseline = 0.0;
  double enhanced = 0.0;
  double delta_pp = 0.0;
  bool operator==(const DeltaRow&) const = default;
};

struct DeltaReport {
  std::vector<DeltaRow> rows;  // taxonomy order
  double mean_delta_pp = 0.0;
  std::size_t n_positive = 0;
  std::size_t n_zero = 0;
  std::size_t n_negative = 0;
  std::size_t n_above_5pp = 0;
  bool operator==(const DeltaReport&) const = default;
};

// |delta| below this counts as zero.
inline constexpr double kZeroTolerancePp = 1e-9;

// Both tables must have the same present keypoints (Error{kKeypointSetMismatch}).
DeltaReport Compare(const AccuracyTable& baseline, const AccuracyTable& enhanced);

Json ToJson(const DeltaReport& r);
DeltaReport DeltaReportFromJson(const Json& j);

enum class Format { kText, kJson, kCsv };
Format ParseFormat(std::string_view s);  // throws Error{kUnsupportedFormat}

std::string Render(const DeltaReport& r, Format f);
std::string Render(const AccuracyTable& t, Format f);
// One decimal, with an explicit sign for positive values.
std::string FormatPp(double pp);

struct Analysis {
  corpus::StatsReport stats;
  corpus::CooccurrenceMatrix cooccurrence;
  std::optional<std::size_t> density_mode;
};

Analysis Analyze(std::span<const BenchmarkRecord> dataset, std::size_t top_k = 24);
Json ToJson(const Analysis& a);
std::string Render(const Analysis& a, Format f);

}  // namespace promptalign::benchmark
