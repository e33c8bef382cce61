// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

#include "promptalign/taxonomy.hpp"

namespace promptalign::testing {

// Display name, super-category and criteria, transcribed from the keypoint
// table in table order.
struct Row {
  const char* name;
  SuperCategory super;
  Criteria criteria;
};

inline std::vector<Row> TableRows() {
  using S = SuperCategory;
  using C = Criteria;
  return {
      {"Negation", S::kLinguisticComprehension, C::kTic},
      {"Attribute Consistency", S::kLinguisticComprehension, C::kTic},
      {"Pronoun Resolution", S::kLinguisticComprehension, C::kTic},
      {"Counting", S::kVisualAttributes, C::kTic},
      {"Size", S::kVisualAttributes, C::kTic},
      {"Material", S::kVisualAttributes, C::kTic},
      {"Expression", S::kVisualAttributes, C::kTic},
      {"Artistic Style", S::kVisualAttributes, C::kTic},
      {"Full-body Action", S::kActionInteraction, C::kTicAndSi},
      {"Hand Action", S::kActionInteraction, C::kTicAndSi},
      {"Animal Action", S::kActionInteraction, C::kTicAndSi},
      {"Contact Interaction", S::kActionInteraction, C::kTicAndSi},
      {"Interaction w/o Contact", S::kActionInteraction, C::kTic},
      {"State", S::kActionInteraction, C::kTic},
      {"Comparative Relation", S::kRelationsStructure, C::kTic},
      {"Compositional Relation", S::kRelationsStructure, C::kTic},
      {"Containment Relation", S::kRelationsStructure, C::kTic},
      {"Similarity Relation", S::kRelationsStructure, C::kTic},
      {"Cross-Entity Binding", S::kRelationsStructure, C::kTic},
      {"Entity Layout", S::kRelationsStructure, C::kTic},
      {"Knowledge Application", S::kWorldKnowledgeReasoning, C::kTic},
      {"Counterfactual", S::kWorldKnowledgeReasoning, C::kTic},
      {"Text Rendering", S::kSceneTextTypography, C::kTic},
      {"Text Layout", S::kSceneTextTypography, C::kTic},
  };
}

}  // namespace promptalign::testing
