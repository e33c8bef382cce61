// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "promptalign/records.hpp"

namespace promptalign {

struct EntityAttributes {
  std::optional<std::string> color;
  std::optional<std::string> size;
  std::optional<std::string> material;
  std::optional<std::string> expression;

  bool operator==(const EntityAttributes&) const = default;
};

struct Entity {
  std::string name;
  EntityAttributes attributes;
  int count = 1;

  bool operator==(const Entity&) const = default;
};

enum class RelationKind {
  kSpatial,
  kContainment,
  kComposition,
  kComparison,
  kSimilarity,
  kLayout,
};

std::string_view ToString(RelationKind k);
std::optional<RelationKind> ParseRelationKind(std::string_view s);

struct Relation {
  RelationKind kind = RelationKind::kSpatial;
  std::string subject;
  std::string object;  // empty for layout relations
  std::string detail;

  bool operator==(const Relation&) const = default;
};

struct Action {
  std::string actor;
  std::string verb;  // lemma
  std::optional<std::string> target;
  bool contact = false;
  bool structural_ok = true;

  bool operator==(const Action&) const = default;
};

struct SceneText {
  std::string content;
  std::string position;  // empty when unspecified

  bool operator==(const SceneText&) const = default;
};

// Structured stand-in for a generated image.
struct SceneGraph {
  std::vector<Entity> entities;
  std::vector<Relation> relations;
  std::vector<Action> actions;
  std::vector<SceneText> texts;
  std::optional<std::string> style;
  std::vector<std::string> negated_entities;
  std::vector<std::string> knowledge_tags;
  bool counterfactual = false;

  const Entity* FindEntity(std::string_view name) const;
  Entity* FindEntity(std::string_view name);
  bool empty() const;

  bool operator==(const SceneGraph&) const = default;
};

// Relations whose endpoints name no entity. These are judge-visible
// defects rather than construction errors.
std::vector<const Relation*> DanglingRelations(const SceneGraph& scene);

Json ToJson(const SceneGraph& scene);
SceneGraph SceneFromJson(const Json& j);

// A small SVG rendering of the scene, used as the mock "image" bytes served
// to annotators.
std::string RenderSvg(const SceneGraph& scene, std::string_view caption);

}  // namespace promptalign
