// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

// Supervised-data pipeline: simulated user prompts, teacher candidates,
// automatic filtering, human selection, finalized triplets.

#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "promptalign/endpoint.hpp"
#include "promptalign/records.hpp"

namespace promptalign::curation {

using Clock = std::function<std::chrono::system_clock::time_point()>;

// ISO-8601 UTC with second precision, e.g. 2026-01-02T03:04:05Z.
std::string IsoUtc(std::chrono::system_clock::time_point t);
std::optional<std::chrono::system_clock::time_point> ParseIsoUtc(std::string_view s);

// ---- simulation ----

struct SimulateOptions {
  std::size_t max_chars = 120;
};

// Shortens source descriptions into user-style queries. Without replacement
// while count <= |corpus|, with replacement beyond. Each output keeps its
// source's language and theme and is shorter than the source whenever the
// source has more than one word. Throws EmptyCorpus.
std::vector<UserPrompt> SimulatePrompts(std::span<const UserPrompt> corpus, std::size_t count,
                                        std::uint64_t seed, const SimulateOptions& options = {});

// The shortening rule on its own.
std::string Shorten(std::string_view description, std::size_t max_chars);

// ---- candidate sets ----

enum class Stage { kGenerated, kFiltered, kAwaitingSelection, kFinalized };

std::string_view ToString(Stage s);
std::optional<Stage> ParseStage(std::string_view s);

struct CandidateSet {
  UserPrompt user_prompt;
  std::string cot;
  std::vector<std::string> candidates;
  std::vector<std::string> image_refs;  // empty or one per candidate
  Stage stage = Stage::kGenerated;
  std::vector<StageStamp> provenance;

  bool operator==(const CandidateSet&) const = default;
};

Json ToJson(const CandidateSet& s);
void FromJson(const Json& j, CandidateSet& out);  // throws SchemaError
std::optional<FieldProblem> Check(const CandidateSet& s);

// ---- teacher generation ----

inline constexpr std::size_t kDefaultCandidates = 3;

// Extracts <cot>...</cot> and exactly k <candidate>...</candidate> blocks.
// Throws Error{kMalformedTeacherOutput}.
struct TeacherOutput {
  std::string cot;
  std::vector<std::string> candidates;
};
TeacherOutput ParseTeacherOutput(std::string_view reply, std::size_t k);

// Teacher request body text: the shipped template with the prompt filled in.
std::string TeacherRequest(const UserPrompt& prompt, std::size_t k,
                           const std::optional<std::filesystem::path>& template_path);

struct GenerateOptions {
  // Unset selects the offline template teacher.
  std::optional<endpoint::EndpointConfig> teacher;
  std::size_t k = kDefaultCandidates;
  std::optional<std::filesystem::path> template_path;
  int malformed_retries = 2;
  std::size_t workers = 4;
  Clock clock;
};

// Offline teacher reply in the same wire format as a chat teacher: a
// reasoning block naming the checkable requirements and k rewrites that
// keep every word of the prompt.
std::string TemplateTeacherReply(const UserPrompt& prompt, std::size_t k, std::uint64_t seed);

// Stage stamps "simulated" and "generated". Throws InvalidArgument for
// k < 2, TransportError, MalformedTeacherOutput.
CandidateSet GenerateCandidates(const UserPrompt& prompt, const GenerateOptions& options,
                                std::uint64_t seed = 0);
std::vector<CandidateSet> GenerateAll(std::span<const UserPrompt> prompts,
                                      const GenerateOptions& options, std::uint64_t seed = 0);

// ---- filtering ----

inline constexpr std::string_view kSemanticDeviation = "semantic_deviation";
inline constexpr std::string_view kInformationLoss = "information_loss";
inline constexpr std::string_view kIncoherence = "incoherence";
inline constexpr std::string_view kLengthBounds = "length_bounds";

struct FilterRules {
  std::size_t min_chars = 1;
  std::size_t max_chars = 4000;
  // Fraction of the prompt's content words a candidate must contain.
  double min_content_coverage = 0.5;
  // A token repeated this many times in a row is degenerate.
  std::size_t max_token_run = 3;
  // A character repeated this many times in a row is degenerate.
  std::size_t max_char_run = 12;
  // Distinct/total word trigrams below this is degenerate (>= 6 trigrams).
  double min_distinct_trigram_ratio = 0.5;
  // Extra named entities matched case-insensitively.
  std::vector<std::string> entity_lexicon;
};

Json ToJson(const FilterRules& r);
FilterRules FilterRulesFromJson(const Json& j);  // unknown keys rejected

struct FilterVerdict {
  std::size_t index = 0;
  bool keep = true;
  std::vector<std::string> reasons;  // ordered as the constants above
};

Json ToJson(const FilterVerdict& v);

// Content words: lowercased, singularised, stopwords removed; CJK code
// points count individually.
std::vector<std::string> ContentWords(std::string_view text);

// Quoted spans, runs of capitalised words (a lone sentence-initial word only
// when it is in the lexicon) and lexicon entries.
std::vector<std::string> NamedEntities(std::string_view text, const FilterRules& rules);

FilterVerdict CheckCandidate(const UserPrompt& prompt, std::string_view candidate,
                             const FilterRules& rules);

struct FilterResult {
  // Unset when fewer than two candidates survive.
  std::optional<CandidateSet> survivor;
  std::vector<FilterVerdict> verdicts;
};

// Requires stage generated (InvalidArgument otherwise).
FilterResult AutoFilter(const CandidateSet& set, const FilterRules& rules, Clock clock = {});

// Same labels decided by a chat endpoint with the shipped review template.
FilterVerdict ReviewCandidate(const UserPrompt& prompt, std::string_view candidate,
                              const endpoint::EndpointConfig& reviewer,
                              const std::optional<std::filesystem::path>& template_path = {});

}  // namespace promptalign::curation
