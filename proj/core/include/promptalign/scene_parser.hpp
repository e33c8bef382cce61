// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

// Closed-grammar reader that turns prompt text into scene facts. The mock
// text-to-image surrogate renders these facts and the oracle judge reads
// requirements from them, so both sides agree on one vocabulary.
//
// Recognised surface forms (English only):
//   counts        "four dogs", "exactly 4 dogs", "some dogs" (vague)
//   attributes    color/size/material/expression adjectives before a noun,
//                 after a wearable ("blue shirt"), or "X made of <material>"
//   negation      "no X", "without X"; "absolutely no X" / "without any X"
//   relations     "X made of Y", "X full of Y", "X inside Y",
//                 "X shaped like Y", "X taller than Y", "X on/above/... Y",
//                 "X in the top-left corner"
//   actions       "<actor> <verb> [<target>]" for a fixed verb lexicon
//   text          quoted strings, optionally followed by a position
//   style         a fixed list of style names ("chinese ink wash", ...)
//   knowledge     a fixed list of famous people and landmarks
//   counterfactual a fixed list of impossible-scene phrases
// A sentence containing "clearly" or "explicitly" states all of its facts
// explicitly; explicit facts are always rendered faithfully.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "promptalign/scene.hpp"

namespace promptalign::grammar {

enum class FactKind {
  kCount,
  kVagueCount,
  kNegation,
  kColor,
  kSize,
  kMaterial,
  kExpression,
  kStyle,
  kAction,
  kRelation,
  kTextContent,
  kTextPosition,
  kKnowledge,
  kCounterfactual,
};

struct Fact {
  std::string key;
  FactKind kind = FactKind::kCount;
  bool is_explicit = false;
  // Attribute reached through a pronoun ("... because it was made of metal").
  bool via_pronoun = false;
  // Color bound to every instance ("all wearing red").
  bool consistent = false;
  std::string entity;
  std::string value;
  int count = 0;
  // Index into scene.actions / relations / texts for those kinds.
  std::size_t index = 0;
  // For pronoun facts: the other candidate referent.
  std::string alt_entity;
};

struct ParsedPrompt {
  SceneGraph scene;
  std::vector<Fact> facts;

  const Fact* FindFact(std::string_view key) const;
};

ParsedPrompt ParsePrompt(std::string_view text);

// Sentence split that keeps quoted spans intact. Terminators stay attached.
std::vector<std::string> SplitSentences(std::string_view text);

enum class ActorKind { kHuman, kAnimal, kHand, kObject, kNature, kUnknown };
enum class VerbClass { kBody, kHand, kContact, kGaze, kState };

// Entity names may carry a "#n" disambiguation suffix; it is ignored.
ActorKind ActorKindOf(std::string_view entity_name);
std::optional<VerbClass> VerbClassOf(std::string_view lemma);

// Keypoint slugs an action is evidence for (full-body-action, hand-action,
// animal-action, contact-interaction, interaction-wo-contact, state).
std::vector<std::string> ActionKeypoints(const Action& action);

// Canonical in-image positions, e.g. "top-left", "bottom", "center".
const std::vector<std::string>& Positions();

// Words the mock renderer and rewrite edits rely on.
inline constexpr std::string_view kClarifyMarker = "Clearly";

}  // namespace promptalign::grammar
