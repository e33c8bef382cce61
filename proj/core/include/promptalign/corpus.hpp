// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "promptalign/error.hpp"
#include "promptalign/records.hpp"

namespace promptalign::corpus {

enum class RecordKind { kUserPrompt, kSftTriplet, kBenchmark, kVerdict };

std::optional<RecordKind> ParseRecordKind(std::string_view s);

struct SchemaViolation {
  std::size_t line = 0;  // 1-based
  std::string field;
  std::string reason;
};

template <typename T>
struct LineResult {
  std::size_t line = 0;
  std::optional<T> record;
  std::optional<SchemaViolation> error;

  bool ok() const { return record.has_value(); }
};

// Streams a JSONL file; invalid lines surface as SchemaViolation results and
// reading continues with the next line. Blank lines are skipped.
template <typename T>
class JsonlReader {
 public:
  explicit JsonlReader(const std::filesystem::path& path) : in_(path) {
    if (!in_) {
      throw Error(ErrorCode::kIoError, "cannot open " + path.string());
    }
  }

  std::optional<LineResult<T>> Next() {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      LineResult<T> out;
      out.line = line_no_;
      try {
        T rec;
        FromJson(Json::parse(line), rec);
        out.record = std::move(rec);
      } catch (const SchemaError& e) {
        out.error = SchemaViolation{line_no_, e.problem().field, e.problem().reason};
      } catch (const Json::exception& e) {
        out.error = SchemaViolation{line_no_, "<line>", e.what()};
      }
      return out;
    }
    if (in_.bad()) throw Error(ErrorCode::kIoError, "read failure");
    return std::nullopt;
  }

 private:
  std::ifstream in_;
  std::size_t line_no_ = 0;
};

template <typename T>
std::vector<LineResult<T>> ReadStream(const std::filesystem::path& path) {
  JsonlReader<T> reader(path);
  std::vector<LineResult<T>> out;
  while (auto r = reader.Next()) out.push_back(std::move(*r));
  return out;
}

// Reads and throws Error{kSchemaViolation} on the first invalid line.
template <typename T>
std::vector<T> ReadAllStrict(const std::filesystem::path& path) {
  std::vector<T> out;
  for (auto& r : ReadStream<T>(path)) {
    if (!r.ok()) {
      throw Error(ErrorCode::kSchemaViolation,
                  path.string() + ":" + std::to_string(r.error->line) + ": " +
                      r.error->field + ": " + r.error->reason);
    }
    out.push_back(std::move(*r.record));
  }
  return out;
}

std::string SerializeLine(const Json& j);

// Validates every record first, so nothing is written when any record is
// invalid (Error{kSchemaViolation}). Returns the number of records written.
template <typename T>
std::size_t WriteStream(const std::filesystem::path& path, std::span<const T> records) {
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (auto p = Check(records[i])) {
      throw Error(ErrorCode::kSchemaViolation,
                  "record " + std::to_string(i) + ": " + p->field + ": " + p->reason);
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  for (const auto& r : records) out << SerializeLine(ToJson(r));
  out.flush();
  if (!out) throw Error(ErrorCode::kIoError, "write failure on " + path.string());
  return records.size();
}

template <typename T>
std::size_t WriteStream(const std::filesystem::path& path, const std::vector<T>& records) {
  return WriteStream(path, std::span<const T>(records));
}

// ---- statistics ----

// The minimal view of a record the statistics need.
struct StatsItem {
  std::string text;
  Language language = Language::kEn;
  std::optional<Theme> theme;
  std::size_t keypoint_count = 0;
};

std::vector<StatsItem> ToStatsItems(std::span<const BenchmarkRecord> records);
std::vector<StatsItem> ToStatsItems(std::span<const UserPrompt> records);
std::vector<StatsItem> ToStatsItems(std::span<const SftTriplet> records);

struct StatsReport {
  std::size_t total = 0;
  std::map<Language, std::size_t> language_counts;
  std::map<Language, double> language_percent;
  std::map<Language, double> mean_length;  // characters
  std::size_t length_bin_width = 50;
  // Bin start (characters) -> count.
  std::map<std::size_t, std::size_t> length_histogram;
  std::map<std::size_t, std::size_t> density_histogram;
  std::map<Theme, std::size_t> theme_counts;
  std::map<Theme, double> theme_percent;
};

StatsReport DatasetStats(std::span<const StatsItem> items,
                         std::size_t length_bin_width = 50);

Json ToJson(const StatsReport& report);
std::string RenderTable(const StatsReport& report);

// Mode of a density histogram (smallest density on ties); nullopt if empty.
std::optional<std::size_t> DensityMode(const std::map<std::size_t, std::size_t>& hist);

struct CooccurrenceMatrix {
  std::vector<std::string> keypoints;
  // counts[i][j] = number of records containing both keypoints[i] and
  // keypoints[j]; counts[i][i] = frequency of keypoints[i].
  std::vector<std::vector<std::size_t>> counts;
};

// Keeps the top_k most frequent keypoints (ties in taxonomy order). When
// fewer than top_k keypoints occur, the remainder is filled from taxonomy
// order with zero rows, so the matrix is always min(top_k, 24) square.
CooccurrenceMatrix Cooccurrence(std::span<const std::vector<std::string>> keypoint_sets,
                                std::size_t top_k);
CooccurrenceMatrix Cooccurrence(std::span<const BenchmarkRecord> records,
                                std::size_t top_k);

Json ToJson(const CooccurrenceMatrix& m);

}  // namespace promptalign::corpus
