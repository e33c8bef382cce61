// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#include "promptalign/remote_judge.hpp"

#include "promptalign/assets.hpp"
#include "promptalign/error.hpp"
#include "promptalign/log.hpp"

namespace promptalign::evaluator {

namespace {

[[noreturn]] void Malformed(const std::string& why) {
  throw Error(ErrorCode::kMalformedJudgment, why);
}

}  // namespace

Verdict ParseJudgment(std::string_view reply, const std::string& record_id, const KeyPoint& kp,
                      const std::string& judge_id) {
  constexpr std::string_view kOpen = "<verdict>";
  constexpr std::string_view kClose = "</verdict>";
  const auto begin = reply.find(kOpen);
  if (begin == std::string_view::npos) Malformed("no <verdict> block");
  const auto end = reply.find(kClose, begin);
  if (end == std::string_view::npos) Malformed("unterminated <verdict> block");
  const auto body = reply.substr(begin + kOpen.size(), end - begin - kOpen.size());
  Json j;
  try {
    j = Json::parse(body);
  } catch (const Json::exception&) {
    Malformed("verdict is not JSON");
  }
  if (!j.is_object()) Malformed("verdict is not an object");
  Verdict v;
  v.record_id = record_id;
  v.keypoint_id = kp.id;
  v.judge_id = judge_id;
  try {
    if (j.contains("keypoint_id") && j["keypoint_id"].get<std::string>() != kp.id) {
      Malformed("verdict names keypoint " + j["keypoint_id"].get<std::string>());
    }
    const auto& score = j.at("score");
    if (score.is_boolean()) {
      v.score = score.get<bool>() ? 1.0 : 0.0;
    } else {
      v.score = score.get<double>();
    }
    if (j.contains("tic_pass") && !j["tic_pass"].is_null()) v.tic_pass = j["tic_pass"].get<bool>();
    if (j.contains("si_pass") && !j["si_pass"].is_null()) v.si_pass = j["si_pass"].get<bool>();
    if (j.contains("rationale") && j["rationale"].is_string()) {
      v.rationale = j["rationale"].get<std::string>();
    }
  } catch (const Json::exception& e) {
    Malformed(std::string("verdict field: ") + e.what());
  }
  if (!(v.score >= 0.0 && v.score <= 1.0)) Malformed("score outside [0,1]");
  v.pass = v.score >= kPassThreshold;
  if (kp.criteria == Criteria::kTicAndSi) {
    if (!v.tic_pass) v.tic_pass = v.pass;
    if (!v.si_pass) v.si_pass = v.pass;
  } else {
    if (!v.tic_pass) v.tic_pass = v.pass;
    v.si_pass.reset();
  }
  if (auto problem = Check(v)) Malformed(problem->field + ": " + problem->reason);
  return v;
}

Verdict RemoteJudgeKeypoint(const std::string& image_ref, const UserPrompt& prompt,
                            const KeyPoint& kp, const RemoteJudgeOptions& options) {
  const auto tmpl = assets::Load(kJudgeTemplate, options.template_path);
  endpoint::ChatRequest req;
  req.temperature = 0.0;
  req.messages.push_back({"user", assets::Render(tmpl, {{"user_prompt", prompt.text},
                                                        {"image_ref", image_ref},
                                                        {"keypoint_name", kp.display_name},
                                                        {"keypoint_id", kp.id},
                                                        {"criteria", std::string(ToString(kp.criteria))}})});
  std::string last;
  for (int attempt = 0; attempt <= options.malformed_retries; ++attempt) {
    const auto res = endpoint::ChatComplete(req, options.endpoint);
    try {
      return ParseJudgment(res.text, prompt.id, kp, options.judge_id);
    } catch (const Error& e) {
      last = e.what();
      log::Logger()->warn("judge reply for {}/{} malformed: {}", prompt.id, kp.id, last);
    }
  }
  Malformed(prompt.id + "/" + kp.id + ": " + last);
}

RewardReport RemoteEvaluate(const std::string& image_ref, const UserPrompt& prompt,
                            const RemoteJudgeOptions& options) {
  std::vector<Verdict> verdicts;
  for (const auto& id : prompt.keypoint_ids) {
    verdicts.push_back(RemoteJudgeKeypoint(image_ref, prompt, taxonomy::Lookup(id), options));
  }
  return Aggregate(verdicts);
}

}  // namespace promptalign::evaluator
