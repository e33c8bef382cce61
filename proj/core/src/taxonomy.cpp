// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#include "promptalign/taxonomy.hpp"

#include <cctype>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "promptalign/error.hpp"

namespace promptalign {

std::string_view ToString(SuperCategory c) {
  switch (c) {
    case SuperCategory::kLinguisticComprehension:
      return "LinguisticComprehension";
    case SuperCategory::kVisualAttributes:
      return "VisualAttributes";
    case SuperCategory::kActionInteraction:
      return "ActionInteraction";
    case SuperCategory::kRelationsStructure:
      return "RelationsStructure";
    case SuperCategory::kWorldKnowledgeReasoning:
      return "WorldKnowledgeReasoning";
    case SuperCategory::kSceneTextTypography:
      return "SceneTextTypography";
  }
  return "?";
}

std::string_view ToString(Criteria c) {
  switch (c) {
    case Criteria::kTic:
      return "TIC";
    case Criteria::kSi:
      return "SI";
    case Criteria::kTicAndSi:
      return "TIC_AND_SI";
  }
  return "?";
}

std::optional<SuperCategory> ParseSuperCategory(std::string_view s) {
  for (int i = 0; i < static_cast<int>(kNumSuperCategories); ++i) {
    const auto c = static_cast<SuperCategory>(i);
    if (ToString(c) == s) return c;
  }
  return std::nullopt;
}

std::optional<Criteria> ParseCriteria(std::string_view s) {
  for (auto c : {Criteria::kTic, Criteria::kSi, Criteria::kTicAndSi}) {
    if (ToString(c) == s) return c;
  }
  return std::nullopt;
}

namespace taxonomy {
namespace {

using SC = SuperCategory;
using CR = Criteria;

const std::vector<KeyPoint>& Table() {
  static const std::vector<KeyPoint> kTable = {
      {"negation", "Negation", SC::kLinguisticComprehension, "Logical Ops",
       CR::kTic, "Interpret negatives: entities the prompt excludes must be absent.",
       {"A bowl of beef noodles, no scallions.", "no scallions are depicted"}},
      {"attribute-consistency", "Attribute Consistency",
       SC::kLinguisticComprehension, "Logical Ops", CR::kTic,
       "One attribute bound to many instances must hold for every instance.",
       {"Five people all wearing red clothes.", "every person wears red"}},
      {"pronoun-resolution", "Pronoun Resolution",
       SC::kLinguisticComprehension, "Co-reference", CR::kTic,
       "Resolve pronoun references and bind their attributes to the referent.",
       {"The large ball broke the table because it was made of metal.",
        "the ball, not the table, is metal"}},
      {"counting", "Counting", SC::kVisualAttributes, "Obj-level", CR::kTic,
       "Render the stated number of instances (numeracy for n >= 3).",
       {"A picture with four dogs.", "exactly four dogs"}},
      {"size", "Size", SC::kVisualAttributes, "Obj-level", CR::kTic,
       "Render relative size adjectives faithfully.",
       {"Two large spheres.", "the spheres are large"}},
      {"material", "Material", SC::kVisualAttributes, "Obj-level", CR::kTic,
       "Render the stated material of an object.",
       {"An ice sculpture of an eagle.", "the sculpture is made of ice"}},
      {"expression", "Expression", SC::kVisualAttributes, "Obj-level", CR::kTic,
       "Capture the stated facial emotion.",
       {"A strong man, low-angle shot, with a contemptuous expression.",
        "the man looks contemptuous"}},
      {"artistic-style", "Artistic Style", SC::kVisualAttributes,
       "Global Style", CR::kTic, "Adhere to the requested artistic style.",
       {"Eight galloping horses in Chinese ink wash.",
        "rendered in chinese ink wash style"}},
      {"full-body-action", "Full-body Action", SC::kActionInteraction,
       "Individual Action", CR::kTicAndSi,
       "Depict complex whole-body movement with a plausible body structure.",
       {"A girl performing a Thomas flare.",
        "the girl performs the move with intact anatomy"}},
      {"hand-action", "Hand Action", SC::kActionInteraction,
       "Individual Action", CR::kTicAndSi,
       "Depict detailed hand and finger actions with correct structure.",
       {"A hand using chopsticks to pick up food.",
        "the hand uses chopsticks with correct fingers"}},
      {"animal-action", "Animal Action", SC::kActionInteraction,
       "Individual Action", CR::kTicAndSi,
       "Depict actions performed by animals with plausible anatomy.",
       {"A puppy happily running.", "the puppy runs with intact anatomy"}},
      {"contact-interaction", "Contact Interaction", SC::kActionInteraction,
       "Interaction", CR::kTicAndSi,
       "Depict physical interaction between entities with plausible contact.",
       {"A boxer lands a punch on a punching bag.",
        "the boxer's fist contacts the punching bag"}},
      {"interaction-wo-contact", "Interaction w/o Contact",
       SC::kActionInteraction, "Interaction", CR::kTic,
       "Depict non-physical interaction without introducing contact.",
       {"Einstein looking at Hawking.",
        "Einstein looks at Hawking without touching"}},
      {"state", "State", SC::kActionInteraction, "State", CR::kTic,
       "Depict a continuous state of being or ongoing motion.",
       {"A gust of wind blows, cherry blossoms dance in the air.",
        "wind blows and blossoms are airborne"}},
      {"comparative-relation", "Comparative Relation",
       SC::kRelationsStructure, "Semantic Rel.", CR::kTic,
       "Render attribute comparisons between entities in the stated direction.",
       {"Woman in red dress taller than woman in yellow.",
        "the woman in red is taller"}},
      {"compositional-relation", "Compositional Relation",
       SC::kRelationsStructure, "Semantic Rel.", CR::kTic,
       "Render an entity composed of other entities.",
       {"A cat made of orange slices.", "the cat is composed of orange slices"}},
      {"containment-relation", "Containment Relation",
       SC::kRelationsStructure, "Semantic Rel.", CR::kTic,
       "Render a container holding the stated content.",
       {"A cup full of soda water.", "the cup contains soda water"}},
      {"similarity-relation", "Similarity Relation", SC::kRelationsStructure,
       "Semantic Rel.", CR::kTic,
       "Render an entity resembling another in shape.",
       {"A lake shaped like a guitar.", "the lake has a guitar shape"}},
      {"cross-entity-binding", "Cross-Entity Binding",
       SC::kRelationsStructure, "Spatial Layout", CR::kTic,
       "Bind distinct attributes to their own entities without leakage.",
       {"Man (buzz cut, blue shirt) and woman (long hair, yellow shirt).",
        "blue belongs to the man and yellow to the woman"}},
      {"entity-layout", "Entity Layout", SC::kRelationsStructure,
       "Spatial Layout", CR::kTic,
       "Arrange entities in the specified positions.",
       {"A race car on a city track, with a mini-map in the top-left corner.",
        "car on track and mini-map at top-left"}},
      {"knowledge-application", "Knowledge Application",
       SC::kWorldKnowledgeReasoning, "World Knowledge", CR::kTic,
       "Render famous entities recognisably.",
       {"The Great Wall of China / Marie Curie.",
        "recognisable Great Wall of China and Marie Curie"}},
      {"counterfactual", "Counterfactual", SC::kWorldKnowledgeReasoning,
       "Abstract Reasoning", CR::kTic,
       "Render surreal or physically impossible scenes as asked.",
       {"A girl held onto the stem of a huge dandelion with both hands, "
        "suspended above the clouds.",
        "the impossible suspension is depicted"}},
      {"text-rendering", "Text Rendering", SC::kSceneTextTypography,
       "In-Image Text", CR::kTic, "Render in-image text content exactly.",
       {"Poster with text \"Game of Thrones\" at the bottom.",
        "the text reads Game of Thrones"}},
      {"text-layout", "Text Layout", SC::kSceneTextTypography,
       "In-Image Text", CR::kTic, "Place in-image text where instructed.",
       {"Poster of a woman on a throne of waves, text \"Game of Thrones\" at "
        "the bottom.",
        "the text sits at the bottom"}},
  };
  return kTable;
}

bool IsSlug(std::string_view s) {
  if (s.empty() || s.front() == '-' || s.back() == '-') return false;
  for (char c : s) {
    if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-')) {
      return false;
    }
  }
  return s.find("--") == std::string_view::npos;
}

}  // namespace

std::span<const KeyPoint> Registry() { return Table(); }

const KeyPoint* Find(std::string_view id) {
  for (const auto& kp : Table()) {
    if (kp.id == id) return &kp;
  }
  return nullptr;
}

const KeyPoint& Lookup(std::string_view id) {
  if (const auto* kp = Find(id)) return *kp;
  throw Error(ErrorCode::kUnknownKeyPoint,
              "unknown keypoint '" + std::string(id) + "'");
}

std::optional<std::size_t> IndexOf(std::string_view id) {
  const auto& t = Table();
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i].id == id) return i;
  }
  return std::nullopt;
}

std::string Slugify(std::string_view name) {
  std::string out;
  bool pending_hyphen = false;
  for (char c : name) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) {
      if (pending_hyphen && !out.empty()) out.push_back('-');
      pending_hyphen = false;
      out.push_back(static_cast<char>(std::tolower(u)));
    } else if (c == '/') {
      // "w/o" collapses to "wo".
    } else {
      pending_hyphen = true;
    }
  }
  return out;
}

ValidationReport Validate(std::span<const KeyPoint> registry) {
  ValidationReport report;
  auto add = [&](std::string kind, std::string detail) {
    report.violations.push_back({std::move(kind), std::move(detail)});
  };
  if (registry.size() != kNumKeyPoints) {
    add("expected 24", "registry has " + std::to_string(registry.size()) +
                           " keypoints");
  }
  std::set<std::string> ids;
  std::set<SuperCategory> groups;
  for (const auto& kp : registry) {
    if (!ids.insert(kp.id).second) add("duplicate id", kp.id);
    if (!IsSlug(kp.id)) add("malformed id", kp.id);
    groups.insert(kp.super_category);
    if (kp.display_name.empty()) add("empty field", kp.id + ": display_name");
    if (kp.category.empty()) add("empty field", kp.id + ": category");
    if (kp.description.empty()) add("empty field", kp.id + ": description");
    if (kp.canonical_example.prompt.empty() ||
        kp.canonical_example.assertion.empty()) {
      add("empty field", kp.id + ": canonical_example");
    }
    if (kp.criteria == Criteria::kSi) add("SI without TIC", kp.id);
  }
  if (groups.size() != kNumSuperCategories) {
    add("expected 6 super-categories",
        "registry covers " + std::to_string(groups.size()));
  }
  return report;
}

std::string ExportJsonl(std::span<const KeyPoint> registry) {
  std::ostringstream out;
  for (const auto& kp : registry) {
    nlohmann::ordered_json j;
    j["id"] = kp.id;
    j["name"] = kp.display_name;
    j["super_category"] = ToString(kp.super_category);
    j["category"] = kp.category;
    j["criteria"] = ToString(kp.criteria);
    j["description"] = kp.description;
    j["example"] = {{"prompt", kp.canonical_example.prompt},
                    {"assertion", kp.canonical_example.assertion}};
    out << j.dump() << '\n';
  }
  return out.str();
}

std::vector<KeyPoint> ImportJsonl(std::string_view jsonl) {
  std::vector<KeyPoint> out;
  std::istringstream in{std::string(jsonl)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      KeyPoint kp;
      kp.id = j.at("id").get<std::string>();
      kp.display_name = j.at("name").get<std::string>();
      const auto sc = ParseSuperCategory(j.at("super_category").get<std::string>());
      const auto cr = ParseCriteria(j.at("criteria").get<std::string>());
      if (!sc || !cr) throw std::invalid_argument("bad enum value");
      kp.super_category = *sc;
      kp.criteria = *cr;
      kp.category = j.at("category").get<std::string>();
      kp.description = j.at("description").get<std::string>();
      kp.canonical_example.prompt = j.at("example").at("prompt").get<std::string>();
      kp.canonical_example.assertion =
          j.at("example").at("assertion").get<std::string>();
      out.push_back(std::move(kp));
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kSchemaViolation,
                  "taxonomy line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace taxonomy
}  // namespace promptalign
