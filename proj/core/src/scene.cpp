// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#include "promptalign/scene.hpp"

#include <algorithm>
#include <sstream>

#include "promptalign/records.hpp"

namespace promptalign {

std::string_view ToString(RelationKind k) {
  switch (k) {
    case RelationKind::kSpatial: return "spatial";
    case RelationKind::kContainment: return "containment";
    case RelationKind::kComposition: return "composition";
    case RelationKind::kComparison: return "comparison";
    case RelationKind::kSimilarity: return "similarity";
    case RelationKind::kLayout: return "layout";
  }
  return "?";
}

std::optional<RelationKind> ParseRelationKind(std::string_view s) {
  for (auto k : {RelationKind::kSpatial, RelationKind::kContainment,
                 RelationKind::kComposition, RelationKind::kComparison,
                 RelationKind::kSimilarity, RelationKind::kLayout}) {
    if (ToString(k) == s) return k;
  }
  return std::nullopt;
}

const Entity* SceneGraph::FindEntity(std::string_view name) const {
  for (const auto& e : entities) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

Entity* SceneGraph::FindEntity(std::string_view name) {
  for (auto& e : entities) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

bool SceneGraph::empty() const {
  return entities.empty() && relations.empty() && actions.empty() &&
         texts.empty() && !style && knowledge_tags.empty() && !counterfactual;
}

std::vector<const Relation*> DanglingRelations(const SceneGraph& scene) {
  std::vector<const Relation*> out;
  for (const auto& r : scene.relations) {
    const bool subject_ok = scene.FindEntity(r.subject) != nullptr;
    const bool object_ok = r.object.empty() || scene.FindEntity(r.object) != nullptr;
    if (!subject_ok || !object_ok) out.push_back(&r);
  }
  return out;
}

namespace {

void PutOpt(Json& j, const char* key, const std::optional<std::string>& v) {
  if (v) j[key] = *v;
}

std::optional<std::string> GetOpt(const Json& j, const char* key) {
  if (j.contains(key) && j[key].is_string()) return j[key].get<std::string>();
  return std::nullopt;
}

std::string Escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace

Json ToJson(const SceneGraph& s) {
  Json j;
  Json entities = Json::array();
  for (const auto& e : s.entities) {
    Json attrs = Json::object();
    PutOpt(attrs, "color", e.attributes.color);
    PutOpt(attrs, "size", e.attributes.size);
    PutOpt(attrs, "material", e.attributes.material);
    PutOpt(attrs, "expression", e.attributes.expression);
    entities.push_back({{"name", e.name}, {"attributes", attrs}, {"count", e.count}});
  }
  j["entities"] = std::move(entities);
  Json relations = Json::array();
  for (const auto& r : s.relations) {
    relations.push_back({{"kind", ToString(r.kind)},
                         {"subject", r.subject},
                         {"object", r.object},
                         {"detail", r.detail}});
  }
  j["relations"] = std::move(relations);
  Json actions = Json::array();
  for (const auto& a : s.actions) {
    Json aj = {{"actor", a.actor},
               {"verb", a.verb},
               {"contact", a.contact},
               {"structural_ok", a.structural_ok}};
    PutOpt(aj, "target", a.target);
    actions.push_back(std::move(aj));
  }
  j["actions"] = std::move(actions);
  Json texts = Json::array();
  for (const auto& t : s.texts) {
    texts.push_back({{"content", t.content}, {"position", t.position}});
  }
  j["texts"] = std::move(texts);
  if (s.style) j["style"] = *s.style;
  j["negated_entities"] = s.negated_entities;
  j["knowledge_tags"] = s.knowledge_tags;
  j["counterfactual"] = s.counterfactual;
  return j;
}

SceneGraph SceneFromJson(const Json& j) {
  SceneGraph s;
  for (const auto& e : j.value("entities", Json::array())) {
    Entity ent;
    ent.name = e.at("name").get<std::string>();
    ent.count = e.value("count", 1);
    const auto attrs = e.value("attributes", Json::object());
    ent.attributes.color = GetOpt(attrs, "color");
    ent.attributes.size = GetOpt(attrs, "size");
    ent.attributes.material = GetOpt(attrs, "material");
    ent.attributes.expression = GetOpt(attrs, "expression");
    s.entities.push_back(std::move(ent));
  }
  for (const auto& r : j.value("relations", Json::array())) {
    Relation rel;
    const auto kind = ParseRelationKind(r.at("kind").get<std::string>());
    if (!kind) throw SchemaError("relations.kind", "unknown relation kind");
    rel.kind = *kind;
    rel.subject = r.at("subject").get<std::string>();
    rel.object = r.value("object", "");
    rel.detail = r.value("detail", "");
    s.relations.push_back(std::move(rel));
  }
  for (const auto& a : j.value("actions", Json::array())) {
    Action act;
    act.actor = a.at("actor").get<std::string>();
    act.verb = a.at("verb").get<std::string>();
    act.target = GetOpt(a, "target");
    act.contact = a.value("contact", false);
    act.structural_ok = a.value("structural_ok", true);
    s.actions.push_back(std::move(act));
  }
  for (const auto& t : j.value("texts", Json::array())) {
    s.texts.push_back({t.at("content").get<std::string>(), t.value("position", "")});
  }
  s.style = GetOpt(j, "style");
  s.negated_entities = j.value("negated_entities", std::vector<std::string>{});
  s.knowledge_tags = j.value("knowledge_tags", std::vector<std::string>{});
  s.counterfactual = j.value("counterfactual", false);
  return s;
}

std::string RenderSvg(const SceneGraph& scene, std::string_view caption) {
  std::ostringstream lines;
  int y = 40;
  auto line = [&](const std::string& text) {
    lines << "  <text x=\"12\" y=\"" << y << "\" font-size=\"14\">" << Escape(text)
          << "</text>\n";
    y += 20;
  };
  for (const auto& e : scene.entities) {
    std::string t = std::to_string(e.count) + " x " + e.name;
    const auto& a = e.attributes;
    for (const auto* v : {&a.color, &a.size, &a.material, &a.expression}) {
      if (*v) t += " [" + **v + "]";
    }
    line(t);
  }
  for (const auto& r : scene.relations) {
    line(std::string(ToString(r.kind)) + ": " + r.subject + " " + r.detail + " " +
         r.object);
  }
  for (const auto& a : scene.actions) {
    line(a.actor + " " + a.verb + (a.target ? " " + *a.target : "") +
         (a.structural_ok ? "" : " (distorted)"));
  }
  for (const auto& t : scene.texts) {
    line("text \"" + t.content + "\" @ " + (t.position.empty() ? "-" : t.position));
  }
  if (scene.style) line("style: " + *scene.style);
  for (const auto& k : scene.knowledge_tags) line("depicts: " + k);
  if (scene.counterfactual) line("surreal");
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"512\" height=\""
      << std::max(y + 10, 80) << "\">\n"
      << "  <rect width=\"100%\" height=\"100%\" fill=\"#f7f7f2\"/>\n"
      << "  <text x=\"12\" y=\"20\" font-size=\"12\" fill=\"#666\">"
      << Escape(caption.substr(0, 80)) << "</text>\n"
      << lines.str() << "</svg>\n";
  return svg.str();
}

}  // namespace promptalign
