// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace promptalign {

enum class SuperCategory {
  kLinguisticComprehension,
  kVisualAttributes,
  kActionInteraction,
  kRelationsStructure,
  kWorldKnowledgeReasoning,
  kSceneTextTypography,
};

inline constexpr std::size_t kNumSuperCategories = 6;
inline constexpr std::size_t kNumKeyPoints = 24;

// TIC = text-image consistency, SI = structural integrity.
enum class Criteria { kTic, kSi, kTicAndSi };

std::string_view ToString(SuperCategory c);
std::string_view ToString(Criteria c);
std::optional<SuperCategory> ParseSuperCategory(std::string_view s);
std::optional<Criteria> ParseCriteria(std::string_view s);

struct CanonicalExample {
  std::string prompt;
  // What a checker must observe in a faithful rendering of `prompt`.
  std::string assertion;

  bool operator==(const CanonicalExample&) const = default;
};

struct KeyPoint {
  std::string id;
  std::string display_name;
  SuperCategory super_category;
  std::string category;
  Criteria criteria;
  std::string description;
  CanonicalExample canonical_example;

  bool operator==(const KeyPoint&) const = default;
};

namespace taxonomy {

// The 24 alignment keypoints in canonical table order. The returned span
// refers to static storage and is identical on every call.
std::span<const KeyPoint> Registry();

// Throws Error{kUnknownKeyPoint}.
const KeyPoint& Lookup(std::string_view id);

// Non-throwing variant.
const KeyPoint* Find(std::string_view id);

// Position of `id` in canonical order, or nullopt.
std::optional<std::size_t> IndexOf(std::string_view id);

struct Violation {
  std::string kind;  // "duplicate id", "expected 24", ...
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

// Checks count, super-category coverage, id uniqueness/slug form, and
// non-empty text fields. Violations are data; this never throws.
ValidationReport Validate(std::span<const KeyPoint> registry);
inline ValidationReport ValidateRegistry() { return Validate(Registry()); }

// Lowercase-hyphenated slug derived from a display name
// ("Interaction w/o Contact" -> "interaction-wo-contact").
std::string Slugify(std::string_view display_name);

// One JSON object per line:
// {id, name, super_category, category, criteria, description, example}.
std::string ExportJsonl(std::span<const KeyPoint> registry);
std::vector<KeyPoint> ImportJsonl(std::string_view jsonl);

}  // namespace taxonomy
}  // namespace promptalign
