// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>

#include "promptalign/evaluator.hpp"
#include "promptalign/rng.hpp"
#include "promptalign/text_util.hpp"

namespace promptalign::evaluator {

namespace {

using grammar::Fact;
using grammar::FactKind;

std::optional<std::string>& AttrRef(Entity& e, FactKind k) {
  switch (k) {
    case FactKind::kColor: return e.attributes.color;
    case FactKind::kSize: return e.attributes.size;
    case FactKind::kMaterial: return e.attributes.material;
    default: return e.attributes.expression;
  }
}

std::string OtherPosition(const std::string& pos) {
  const auto& all = grammar::Positions();
  auto it = std::find(all.begin(), all.end(), pos);
  if (it == all.end() || std::next(it) == all.end()) return all.front();
  return *std::next(it);
}

bool HasSiKeypoint(const Action& a) {
  for (const auto& kp : grammar::ActionKeypoints(a)) {
    if (kp == "full-body-action" || kp == "hand-action" || kp == "animal-action" ||
        kp == "contact-interaction") {
      return true;
    }
  }
  return false;
}

void Degrade(const Fact& f, SceneGraph& scene, Rng& rng, std::vector<bool>& drop_action,
             std::vector<bool>& drop_relation) {
  switch (f.kind) {
    case FactKind::kCount: {
      Entity* e = scene.FindEntity(f.entity);
      if (e == nullptr) return;
      e->count = (e->count > 1 && rng.Uniform() < 0.5) ? e->count - 1 : e->count + 1;
      return;
    }
    case FactKind::kVagueCount:
      return;
    case FactKind::kNegation: {
      std::erase(scene.negated_entities, f.entity);
      if (scene.FindEntity(f.entity) == nullptr) scene.entities.push_back({f.entity, {}, 1});
      return;
    }
    case FactKind::kColor:
    case FactKind::kSize:
    case FactKind::kMaterial:
    case FactKind::kExpression: {
      Entity* e = scene.FindEntity(f.entity);
      if (e == nullptr) return;
      auto& attr = AttrRef(*e, f.kind);
      if (f.via_pronoun) {
        // Attribute lands on the wrong referent.
        attr.reset();
        if (Entity* alt = scene.FindEntity(f.alt_entity)) AttrRef(*alt, f.kind) = f.value;
        return;
      }
      if (f.kind == FactKind::kColor) {
        if (f.consistent) {
          attr = "mixed";
          return;
        }
        for (const auto& other : scene.entities) {
          if (other.name != e->name && other.attributes.color &&
              other.attributes.color != f.value) {
            attr = other.attributes.color;
            return;
          }
        }
        attr.reset();
        return;
      }
      if (f.kind == FactKind::kExpression) {
        attr = "neutral";
        return;
      }
      attr.reset();
      return;
    }
    case FactKind::kStyle:
      scene.style.reset();
      return;
    case FactKind::kAction: {
      auto& a = scene.actions[f.index];
      if (HasSiKeypoint(a)) {
        a.structural_ok = false;
      } else if (a.target && grammar::VerbClassOf(a.verb) == grammar::VerbClass::kGaze) {
        a.contact = true;
      } else {
        drop_action[f.index] = true;
      }
      return;
    }
    case FactKind::kRelation: {
      auto& r = scene.relations[f.index];
      switch (r.kind) {
        case RelationKind::kComparison:
        case RelationKind::kSpatial:
          std::swap(r.subject, r.object);
          return;
        case RelationKind::kLayout:
          r.detail = OtherPosition(r.detail);
          return;
        default:
          drop_relation[f.index] = true;
          return;
      }
    }
    case FactKind::kTextContent: {
      auto& t = scene.texts[f.index];
      auto cps = text::CodePoints(t.content);
      if (cps.empty()) return;
      cps.erase(cps.begin() + rng.UniformInt(0, static_cast<std::int64_t>(cps.size()) - 1));
      t.content = text::Join(cps, "");
      return;
    }
    case FactKind::kTextPosition: {
      auto& t = scene.texts[f.index];
      t.position = OtherPosition(t.position);
      return;
    }
    case FactKind::kKnowledge:
      std::erase(scene.knowledge_tags, f.value);
      return;
    case FactKind::kCounterfactual:
      scene.counterfactual = false;
      return;
  }
}

}  // namespace

SceneGraph MockT2i(std::string_view prompt_text, std::uint64_t seed,
                   const MockT2iOptions& options) {
  if (text::Trim(prompt_text).empty()) return {};
  const auto parsed = grammar::ParsePrompt(prompt_text);
  SceneGraph scene = parsed.scene;
  std::vector<bool> drop_action(scene.actions.size(), false);
  std::vector<bool> drop_relation(scene.relations.size(), false);
  const auto text_hash = Fnv1a(prompt_text);

  for (const auto& f : parsed.facts) {
    Rng rng(MixSeeds({seed, text_hash, Fnv1a(f.key)}));
    if (f.kind == FactKind::kVagueCount) {
      if (Entity* e = scene.FindEntity(f.entity)) {
        e->count = static_cast<int>(rng.UniformInt(2, 6));
      }
      continue;
    }
    if (f.is_explicit) continue;
    if (rng.Uniform() >= options.failure_rate) continue;
    Degrade(f, scene, rng, drop_action, drop_relation);
  }

  std::vector<Action> actions;
  for (std::size_t i = 0; i < scene.actions.size(); ++i) {
    if (!drop_action[i]) actions.push_back(std::move(scene.actions[i]));
  }
  scene.actions = std::move(actions);
  std::vector<Relation> relations;
  for (std::size_t i = 0; i < scene.relations.size(); ++i) {
    if (!drop_relation[i]) relations.push_back(std::move(scene.relations[i]));
  }
  scene.relations = std::move(relations);
  return scene;
}

}  // namespace promptalign::evaluator
