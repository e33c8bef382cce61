// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#include "promptalign/records.hpp"

#include <array>
#include <cmath>
#include <set>

#include "promptalign/taxonomy.hpp"

namespace promptalign {

std::string_view ToString(Language l) { return l == Language::kZh ? "zh" : "en"; }

std::string_view ToString(Theme t) {
  switch (t) {
    case Theme::kDesign: return "Design";
    case Theme::kArt: return "Art";
    case Theme::kFilmStory: return "FilmStory";
    case Theme::kIllustration: return "Illustration";
    case Theme::kCreative: return "Creative";
  }
  return "?";
}

std::optional<Language> ParseLanguage(std::string_view s) {
  if (s == "zh") return Language::kZh;
  if (s == "en") return Language::kEn;
  return std::nullopt;
}

std::optional<Theme> ParseTheme(std::string_view s) {
  for (auto t : {Theme::kDesign, Theme::kArt, Theme::kFilmStory,
                 Theme::kIllustration, Theme::kCreative}) {
    if (ToString(t) == s) return t;
  }
  return std::nullopt;
}

namespace {

void MergeExtra(Json& j, const Json& extra) {
  if (!extra.is_object()) return;
  for (auto it = extra.begin(); it != extra.end(); ++it) {
    if (!j.contains(it.key())) j[it.key()] = it.value();
  }
}

Json CollectExtra(const Json& j, std::initializer_list<std::string_view> known) {
  Json extra = Json::object();
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool is_known = false;
    for (auto k : known) is_known = is_known || it.key() == k;
    if (!is_known) extra[it.key()] = it.value();
  }
  return extra;
}

const Json& Field(const Json& j, const char* name) {
  if (!j.is_object()) throw SchemaError("<record>", "expected a JSON object");
  auto it = j.find(name);
  if (it == j.end() || it->is_null()) throw SchemaError(name, "missing");
  return *it;
}

std::string StringField(const Json& j, const char* name) {
  const auto& v = Field(j, name);
  if (!v.is_string()) throw SchemaError(name, "expected string");
  return v.get<std::string>();
}

std::vector<std::string> StringList(const Json& j, const char* name) {
  const auto& v = Field(j, name);
  if (!v.is_array()) throw SchemaError(name, "expected array of strings");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) throw SchemaError(name, "expected array of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

Language LanguageField(const Json& j) {
  const auto s = StringField(j, "language");
  auto l = ParseLanguage(s);
  if (!l) throw SchemaError("language", "unsupported language '" + s + "'");
  return *l;
}

void Raise(const std::optional<FieldProblem>& p) {
  if (p) throw SchemaError(p->field, p->reason);
}

std::optional<FieldProblem> CheckKeypointIds(const std::vector<std::string>& ids,
                                             bool require_non_empty) {
  if (require_non_empty && ids.empty()) {
    return FieldProblem{"keypoint_ids", "must be non-empty"};
  }
  std::set<std::string> seen;
  for (const auto& id : ids) {
    if (!taxonomy::Find(id)) {
      return FieldProblem{"keypoint_ids", "unknown keypoint '" + id + "'"};
    }
    if (!seen.insert(id).second) {
      return FieldProblem{"keypoint_ids", "duplicate keypoint '" + id + "'"};
    }
  }
  return std::nullopt;
}

}  // namespace

// ---- UserPrompt ----

Json ToJson(const UserPrompt& r) {
  Json j;
  j["id"] = r.id;
  j["text"] = r.text;
  j["language"] = ToString(r.language);
  j["theme"] = ToString(r.theme);
  j["keypoint_ids"] = r.keypoint_ids;
  if (r.subtheme) j["subtheme"] = *r.subtheme;
  MergeExtra(j, r.extra);
  return j;
}

void FromJson(const Json& j, UserPrompt& out) {
  UserPrompt r;
  r.id = StringField(j, "id");
  r.text = StringField(j, "text");
  r.language = LanguageField(j);
  const auto theme = StringField(j, "theme");
  auto t = ParseTheme(theme);
  if (!t) throw SchemaError("theme", "unknown theme '" + theme + "'");
  r.theme = *t;
  r.keypoint_ids = j.contains("keypoint_ids") ? StringList(j, "keypoint_ids")
                                              : std::vector<std::string>{};
  if (j.contains("subtheme") && !j["subtheme"].is_null()) {
    r.subtheme = StringField(j, "subtheme");
  }
  r.extra = CollectExtra(
      j, {"id", "text", "language", "theme", "keypoint_ids", "subtheme"});
  Raise(Check(r));
  out = std::move(r);
}

std::optional<FieldProblem> Check(const UserPrompt& r) {
  if (r.id.empty()) return FieldProblem{"id", "must be non-empty"};
  if (r.text.empty()) return FieldProblem{"text", "must be non-empty"};
  return CheckKeypointIds(r.keypoint_ids, false);
}

// ---- SftTriplet ----

Json ToJson(const SftTriplet& r) {
  Json j;
  j["user_prompt"] = ToJson(r.user_prompt);
  j["cot"] = r.cot;
  j["reprompt"] = r.reprompt;
  j["candidates"] = r.candidates;
  if (r.selected_index) j["selected_index"] = *r.selected_index;
  Json prov = Json::array();
  for (const auto& s : r.provenance) prov.push_back({{"stage", s.stage}, {"at", s.at}});
  j["provenance"] = std::move(prov);
  MergeExtra(j, r.extra);
  return j;
}

void FromJson(const Json& j, SftTriplet& out) {
  SftTriplet r;
  try {
    FromJson(Field(j, "user_prompt"), r.user_prompt);
  } catch (const SchemaError& e) {
    throw SchemaError("user_prompt." + e.problem().field, e.problem().reason);
  }
  r.cot = StringField(j, "cot");
  r.reprompt = StringField(j, "reprompt");
  r.candidates = StringList(j, "candidates");
  if (j.contains("selected_index") && !j["selected_index"].is_null()) {
    const auto& v = j["selected_index"];
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      throw SchemaError("selected_index", "expected non-negative integer");
    }
    r.selected_index = v.get<std::size_t>();
  }
  if (j.contains("provenance")) {
    const auto& p = j["provenance"];
    if (!p.is_array()) throw SchemaError("provenance", "expected array");
    for (const auto& s : p) {
      r.provenance.push_back({StringField(s, "stage"), StringField(s, "at")});
    }
  }
  r.extra = CollectExtra(j, {"user_prompt", "cot", "reprompt", "candidates",
                             "selected_index", "provenance"});
  Raise(Check(r));
  out = std::move(r);
}

std::optional<FieldProblem> Check(const SftTriplet& r) {
  if (auto p = Check(r.user_prompt)) {
    return FieldProblem{"user_prompt." + p->field, p->reason};
  }
  if (r.cot.empty()) return FieldProblem{"cot", "must be non-empty"};
  if (r.reprompt.empty()) return FieldProblem{"reprompt", "must be non-empty"};
  if (!r.candidates.empty()) {
    if (!r.selected_index) {
      return FieldProblem{"selected_index", "required when candidates are present"};
    }
    if (*r.selected_index >= r.candidates.size()) {
      return FieldProblem{"selected_index", "out of range"};
    }
    if (r.candidates[*r.selected_index] != r.reprompt) {
      return FieldProblem{"reprompt", "must equal candidates[selected_index]"};
    }
  } else if (r.selected_index) {
    return FieldProblem{"selected_index", "out of range"};
  }
  return std::nullopt;
}

// ---- BenchmarkRecord ----

Json ToJson(const BenchmarkRecord& r) {
  Json j;
  j["id"] = r.id;
  j["prompt"] = r.prompt;
  j["language"] = ToString(r.language);
  j["keypoint_ids"] = r.keypoint_ids;
  MergeExtra(j, r.extra);
  return j;
}

void FromJson(const Json& j, BenchmarkRecord& out) {
  BenchmarkRecord r;
  r.id = StringField(j, "id");
  r.prompt = StringField(j, "prompt");
  r.language = LanguageField(j);
  r.keypoint_ids = StringList(j, "keypoint_ids");
  r.extra = CollectExtra(j, {"id", "prompt", "language", "keypoint_ids"});
  Raise(Check(r));
  out = std::move(r);
}

std::optional<FieldProblem> Check(const BenchmarkRecord& r) {
  if (r.id.empty()) return FieldProblem{"id", "must be non-empty"};
  if (r.prompt.empty()) return FieldProblem{"prompt", "must be non-empty"};
  return CheckKeypointIds(r.keypoint_ids, true);
}

// ---- Verdict ----

Json ToJson(const Verdict& r) {
  Json j;
  j["record_id"] = r.record_id;
  j["keypoint_id"] = r.keypoint_id;
  j["pass"] = r.pass;
  j["score"] = r.score;
  if (r.tic_pass) j["tic_pass"] = *r.tic_pass;
  if (r.si_pass) j["si_pass"] = *r.si_pass;
  j["judge_id"] = r.judge_id;
  j["rationale"] = r.rationale;
  MergeExtra(j, r.extra);
  return j;
}

void FromJson(const Json& j, Verdict& out) {
  Verdict r;
  r.record_id = StringField(j, "record_id");
  r.keypoint_id = StringField(j, "keypoint_id");
  const auto& pass = Field(j, "pass");
  if (!pass.is_boolean()) throw SchemaError("pass", "expected boolean");
  r.pass = pass.get<bool>();
  const auto& score = Field(j, "score");
  if (!score.is_number()) throw SchemaError("score", "expected number");
  r.score = score.get<double>();
  for (auto [name, slot] : {std::pair{"tic_pass", &r.tic_pass},
                            std::pair{"si_pass", &r.si_pass}}) {
    if (j.contains(name) && !j[name].is_null()) {
      if (!j[name].is_boolean()) throw SchemaError(name, "expected boolean");
      *slot = j[name].get<bool>();
    }
  }
  r.judge_id = j.contains("judge_id") ? StringField(j, "judge_id") : "";
  r.rationale = j.contains("rationale") ? StringField(j, "rationale") : "";
  r.extra = CollectExtra(j, {"record_id", "keypoint_id", "pass", "score",
                             "tic_pass", "si_pass", "judge_id", "rationale"});
  Raise(Check(r));
  out = std::move(r);
}

std::optional<FieldProblem> Check(const Verdict& r) {
  const auto* kp = taxonomy::Find(r.keypoint_id);
  if (!kp) return FieldProblem{"keypoint_id", "unknown keypoint '" + r.keypoint_id + "'"};
  if (!(r.score >= 0.0 && r.score <= 1.0)) {
    return FieldProblem{"score", "must lie in [0, 1]"};
  }
  if (r.pass != (r.score >= kPassThreshold)) {
    return FieldProblem{"pass", "inconsistent with score threshold"};
  }
  if (kp->criteria == Criteria::kTicAndSi) {
    if (!r.tic_pass || !r.si_pass) {
      return FieldProblem{"si_pass", "TIC_AND_SI keypoints need tic_pass and si_pass"};
    }
    if (r.pass != (*r.tic_pass && *r.si_pass)) {
      return FieldProblem{"pass", "must equal tic_pass && si_pass"};
    }
  }
  return std::nullopt;
}

}  // namespace promptalign
