// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#include "promptalign/evaluator.hpp"

#include <algorithm>

#include "promptalign/error.hpp"
#include "promptalign/text_util.hpp"

namespace promptalign::evaluator {

namespace {

using grammar::Fact;
using grammar::FactKind;

bool IsAttribute(FactKind k) {
  return k == FactKind::kColor || k == FactKind::kSize || k == FactKind::kMaterial ||
         k == FactKind::kExpression;
}

bool ImplicatesAction(const grammar::ParsedPrompt& req, const Fact& f,
                      std::string_view slug) {
  if (f.kind != FactKind::kAction) return false;
  const auto kps = grammar::ActionKeypoints(req.scene.actions[f.index]);
  return std::find(kps.begin(), kps.end(), slug) != kps.end();
}

bool RelationOf(const grammar::ParsedPrompt& req, const Fact& f,
                std::initializer_list<RelationKind> kinds) {
  if (f.kind != FactKind::kRelation) return false;
  const auto k = req.scene.relations[f.index].kind;
  return std::find(kinds.begin(), kinds.end(), k) != kinds.end();
}

std::string BaseName(const std::string& name) { return name.substr(0, name.find('#')); }

const std::optional<std::string>& AttrOf(const Entity& e, FactKind k) {
  switch (k) {
    case FactKind::kColor: return e.attributes.color;
    case FactKind::kSize: return e.attributes.size;
    case FactKind::kMaterial: return e.attributes.material;
    default: return e.attributes.expression;
  }
}

struct Check {
  bool tic = true;
  bool si = true;
  std::vector<std::string> problems;

  void Fail(std::string why) {
    tic = false;
    problems.push_back(std::move(why));
  }
};

void CheckAction(const SceneGraph& scene, const grammar::ParsedPrompt& req, const Fact& f,
                 std::string_view slug, Check& c) {
  const auto& want = req.scene.actions[f.index];
  const Action* got = nullptr;
  for (const auto& a : scene.actions) {
    if (a.actor == want.actor && a.verb == want.verb) got = &a;
  }
  const std::string label = want.actor + " " + want.verb;
  if (got == nullptr || scene.FindEntity(want.actor) == nullptr) {
    c.Fail("action missing: " + label);
    c.si = false;
    return;
  }
  if (want.target && got->target != want.target) c.Fail("wrong target for " + label);
  if (slug == "contact-interaction" && !got->contact) c.Fail("no contact in " + label);
  if (slug == "interaction-wo-contact" && got->contact) c.Fail("unexpected contact in " + label);
  if (!got->structural_ok) {
    c.si = false;
    c.problems.push_back("distorted structure in " + label);
  }
}

void CheckFact(const SceneGraph& scene, const grammar::ParsedPrompt& req, const Fact& f,
               std::string_view slug, Check& c) {
  switch (f.kind) {
    case FactKind::kCount: {
      const Entity* e = scene.FindEntity(f.entity);
      if (e == nullptr) return c.Fail("missing " + f.entity);
      if (e->count != f.count) {
        c.Fail(f.entity + " count " + std::to_string(e->count) + " != " +
               std::to_string(f.count));
      }
      return;
    }
    case FactKind::kVagueCount:
      return;
    case FactKind::kNegation: {
      if (scene.empty()) return c.Fail("empty scene");
      for (const auto& e : scene.entities) {
        if (BaseName(e.name) == f.entity) return c.Fail("forbidden " + f.entity + " present");
      }
      return;
    }
    case FactKind::kColor:
    case FactKind::kSize:
    case FactKind::kMaterial:
    case FactKind::kExpression: {
      const Entity* e = scene.FindEntity(f.entity);
      if (e == nullptr) return c.Fail("missing " + f.entity);
      const auto& v = AttrOf(*e, f.kind);
      if (v != f.value) c.Fail(f.entity + " should be " + f.value);
      return;
    }
    case FactKind::kStyle:
      if (scene.style != f.value) c.Fail("style should be " + f.value);
      return;
    case FactKind::kAction:
      return CheckAction(scene, req, f, slug, c);
    case FactKind::kRelation: {
      const auto& want = req.scene.relations[f.index];
      const bool present =
          std::find(scene.relations.begin(), scene.relations.end(), want) !=
          scene.relations.end();
      const bool endpoints = scene.FindEntity(want.subject) != nullptr &&
                             (want.object.empty() || scene.FindEntity(want.object) != nullptr);
      if (!present || !endpoints) {
        c.Fail(std::string(ToString(want.kind)) + " relation missing: " + want.subject + " " +
               want.detail + " " + want.object);
      }
      return;
    }
    case FactKind::kTextContent: {
      const bool found = std::any_of(scene.texts.begin(), scene.texts.end(),
                                     [&](const SceneText& t) { return t.content == f.value; });
      if (!found) c.Fail("text \"" + f.value + "\" missing");
      return;
    }
    case FactKind::kTextPosition: {
      const auto& want = req.scene.texts[f.index];
      const bool found = std::any_of(scene.texts.begin(), scene.texts.end(), [&](const SceneText& t) {
        return t.content == want.content && t.position == f.value;
      });
      if (!found) c.Fail("text \"" + want.content + "\" not at " + f.value);
      return;
    }
    case FactKind::kKnowledge: {
      const auto& tags = scene.knowledge_tags;
      if (std::find(tags.begin(), tags.end(), f.value) == tags.end()) {
        c.Fail(f.value + " not depicted");
      }
      return;
    }
    case FactKind::kCounterfactual:
      if (!scene.counterfactual) c.Fail("scene is not counterfactual");
      return;
  }
}

}  // namespace

Json ToJson(const RewardReport& report) {
  Json verdicts = Json::array();
  for (const auto& v : report.verdicts) verdicts.push_back(ToJson(v));
  return Json{{"record_id", report.record_id},
              {"reward", report.reward},
              {"verdicts", std::move(verdicts)}};
}

std::vector<const Fact*> RequirementsFor(const grammar::ParsedPrompt& req, const KeyPoint& kp) {
  const std::string& slug = kp.id;
  std::vector<const Fact*> out;
  auto take = [&](auto pred) {
    for (const auto& f : req.facts) {
      if (pred(f)) out.push_back(&f);
    }
  };
  if (slug == "negation") {
    take([](const Fact& f) { return f.kind == FactKind::kNegation; });
  } else if (slug == "attribute-consistency") {
    take([](const Fact& f) { return f.kind == FactKind::kColor && f.consistent; });
  } else if (slug == "pronoun-resolution") {
    take([](const Fact& f) {
      return f.via_pronoun && (IsAttribute(f.kind) || f.kind == FactKind::kRelation);
    });
  } else if (slug == "counting") {
    take([](const Fact& f) { return f.kind == FactKind::kCount; });
  } else if (slug == "size") {
    take([](const Fact& f) { return f.kind == FactKind::kSize && !f.via_pronoun; });
  } else if (slug == "material") {
    take([](const Fact& f) { return f.kind == FactKind::kMaterial && !f.via_pronoun; });
  } else if (slug == "expression") {
    take([](const Fact& f) { return f.kind == FactKind::kExpression && !f.via_pronoun; });
  } else if (slug == "artistic-style") {
    take([](const Fact& f) { return f.kind == FactKind::kStyle; });
  } else if (slug == "full-body-action" || slug == "hand-action" || slug == "animal-action" ||
             slug == "contact-interaction" || slug == "interaction-wo-contact" ||
             slug == "state") {
    take([&](const Fact& f) { return ImplicatesAction(req, f, slug); });
  } else if (slug == "comparative-relation") {
    take([&](const Fact& f) { return RelationOf(req, f, {RelationKind::kComparison}); });
  } else if (slug == "compositional-relation") {
    take([&](const Fact& f) { return RelationOf(req, f, {RelationKind::kComposition}); });
  } else if (slug == "containment-relation") {
    take([&](const Fact& f) { return RelationOf(req, f, {RelationKind::kContainment}); });
  } else if (slug == "similarity-relation") {
    take([&](const Fact& f) { return RelationOf(req, f, {RelationKind::kSimilarity}); });
  } else if (slug == "cross-entity-binding") {
    take([](const Fact& f) {
      return f.kind == FactKind::kColor && !f.consistent && !f.via_pronoun;
    });
    std::vector<std::string> entities;
    for (const auto* f : out) {
      if (std::find(entities.begin(), entities.end(), f->entity) == entities.end()) {
        entities.push_back(f->entity);
      }
    }
    // Binding needs at least two entities to bind attributes across.
    if (entities.size() < 2) out.clear();
  } else if (slug == "entity-layout") {
    take([&](const Fact& f) {
      return RelationOf(req, f, {RelationKind::kLayout, RelationKind::kSpatial});
    });
  } else if (slug == "knowledge-application") {
    take([](const Fact& f) { return f.kind == FactKind::kKnowledge; });
  } else if (slug == "counterfactual") {
    take([](const Fact& f) { return f.kind == FactKind::kCounterfactual; });
  } else if (slug == "text-rendering") {
    take([](const Fact& f) { return f.kind == FactKind::kTextContent; });
  } else if (slug == "text-layout") {
    take([](const Fact& f) { return f.kind == FactKind::kTextPosition; });
  } else {
    throw Error(ErrorCode::kUnsupportedKeyPoint, "no oracle rule for " + slug);
  }
  return out;
}

Verdict JudgeKeypoint(const SceneGraph& scene, const grammar::ParsedPrompt& requirement,
                      const std::string& record_id, const KeyPoint& kp) {
  const auto facts = RequirementsFor(requirement, kp);
  Check c;
  if (facts.empty()) {
    c.Fail("prompt states no checkable " + kp.id + " requirement");
    c.si = false;
  }
  for (const auto* f : facts) CheckFact(scene, requirement, *f, kp.id, c);

  Verdict v;
  v.record_id = record_id;
  v.keypoint_id = kp.id;
  v.judge_id = std::string(kOracleJudgeId);
  v.tic_pass = c.tic;
  if (kp.criteria == Criteria::kTicAndSi) {
    v.si_pass = c.si;
    v.pass = c.tic && c.si;
  } else {
    v.pass = c.tic;
  }
  v.score = v.pass ? 1.0 : 0.0;
  v.rationale = c.problems.empty() ? "ok" : text::Join(c.problems, "; ");
  return v;
}

Verdict JudgeKeypoint(const SceneGraph& scene, const UserPrompt& prompt, const KeyPoint& kp) {
  return JudgeKeypoint(scene, grammar::ParsePrompt(prompt.text), prompt.id, kp);
}

RewardReport Aggregate(std::span<const Verdict> verdicts) {
  if (verdicts.empty()) throw Error(ErrorCode::kEmptyVerdicts, "no verdicts to aggregate");
  RewardReport report;
  report.record_id = verdicts.front().record_id;
  double sum = 0.0;
  for (const auto& v : verdicts) {
    if (v.record_id != report.record_id) {
      throw Error(ErrorCode::kInvalidArgument, "verdicts span several records");
    }
    sum += v.score;
  }
  report.verdicts.assign(verdicts.begin(), verdicts.end());
  report.reward = sum / static_cast<double>(verdicts.size());
  return report;
}

RewardReport Evaluate(const SceneGraph& scene, const grammar::ParsedPrompt& requirement,
                      const UserPrompt& prompt) {
  std::vector<Verdict> verdicts;
  verdicts.reserve(prompt.keypoint_ids.size());
  for (const auto& id : prompt.keypoint_ids) {
    verdicts.push_back(JudgeKeypoint(scene, requirement, prompt.id, taxonomy::Lookup(id)));
  }
  return Aggregate(verdicts);
}

RewardReport Evaluate(const SceneGraph& scene, const UserPrompt& prompt) {
  return Evaluate(scene, grammar::ParsePrompt(prompt.text), prompt);
}

}  // namespace promptalign::evaluator
