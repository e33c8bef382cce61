// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

// Record types shared by every pipeline stage and their JSON mapping.

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace promptalign {

using Json = nlohmann::json;

enum class Language { kZh, kEn };
enum class Theme { kDesign, kArt, kFilmStory, kIllustration, kCreative };

inline constexpr double kPassThreshold = 0.5;

std::string_view ToString(Language l);
std::string_view ToString(Theme t);
std::optional<Language> ParseLanguage(std::string_view s);
std::optional<Theme> ParseTheme(std::string_view s);

struct UserPrompt {
  std::string id;
  std::string text;
  Language language = Language::kEn;
  Theme theme = Theme::kCreative;
  // Taxonomy slugs; may be empty for curation-source prompts.
  std::vector<std::string> keypoint_ids;
  std::optional<std::string> subtheme;
  // Unknown fields, preserved across a parse/serialize round trip.
  Json extra = Json::object();

  bool operator==(const UserPrompt&) const = default;
};

struct StageStamp {
  std::string stage;  // simulated | generated | filtered | selected
  std::string at;     // ISO-8601 UTC

  bool operator==(const StageStamp&) const = default;
};

struct SftTriplet {
  UserPrompt user_prompt;
  std::string cot;
  std::string reprompt;
  std::vector<std::string> candidates;
  std::optional<std::size_t> selected_index;
  std::vector<StageStamp> provenance;
  Json extra = Json::object();

  bool operator==(const SftTriplet&) const = default;
};

struct BenchmarkRecord {
  std::string id;
  std::string prompt;
  Language language = Language::kEn;
  std::vector<std::string> keypoint_ids;
  Json extra = Json::object();

  bool operator==(const BenchmarkRecord&) const = default;
};

struct Verdict {
  std::string record_id;
  std::string keypoint_id;
  bool pass = false;
  double score = 0.0;
  std::optional<bool> tic_pass;
  std::optional<bool> si_pass;
  std::string judge_id;
  std::string rationale;
  Json extra = Json::object();

  bool operator==(const Verdict&) const = default;
};

// A field-level problem found while validating or parsing a record.
struct FieldProblem {
  std::string field;
  std::string reason;
};

Json ToJson(const UserPrompt& r);
Json ToJson(const SftTriplet& r);
Json ToJson(const BenchmarkRecord& r);
Json ToJson(const Verdict& r);

// Parse and validate. Throw SchemaError on the first problem.
void FromJson(const Json& j, UserPrompt& out);
void FromJson(const Json& j, SftTriplet& out);
void FromJson(const Json& j, BenchmarkRecord& out);
void FromJson(const Json& j, Verdict& out);

// Invariant checks on an in-memory record.
std::optional<FieldProblem> Check(const UserPrompt& r);
std::optional<FieldProblem> Check(const SftTriplet& r);
std::optional<FieldProblem> Check(const BenchmarkRecord& r);
std::optional<FieldProblem> Check(const Verdict& r);

// Thrown by FromJson; carries the offending field.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string field, std::string reason)
      : std::runtime_error(field + ": " + reason),
        problem_{std::move(field), std::move(reason)} {}
  const FieldProblem& problem() const { return problem_; }

 private:
  FieldProblem problem_;
};

}  // namespace promptalign
