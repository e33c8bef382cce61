// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#include "promptalign/orchestrator.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <future>
#include <set>
#include <thread>

#include "promptalign/assets.hpp"
#include "promptalign/error.hpp"
#include "promptalign/log.hpp"
#include "promptalign/rewrite.hpp"
#include "promptalign/text_util.hpp"
#include "internal.hpp"

namespace promptalign::orchestrator {

using internal::Hex;
using internal::ParallelFor;

ToyPolicyBackend::ToyPolicyBackend(bool greedy) : greedy_(greedy) {
  for (std::size_t h = 0; h < kNumSuperCategories; ++h) {
    heads_.emplace_back(rewrite::ToyActions());
  }
  reference_ = heads_;
}

ToyPolicyBackend::ToyPolicyBackend(std::vector<grpo::ToyPolicy> heads, bool greedy)
    : heads_(std::move(heads)), greedy_(greedy) {
  if (heads_.size() != kNumSuperCategories) {
    throw Error(ErrorCode::kShapeMismatch, "toy policy needs one head per super-category");
  }
  reference_ = heads_;
}

std::size_t ToyPolicyBackend::HeadOf(const UserPrompt& prompt) {
  if (prompt.keypoint_ids.empty()) return 0;
  const auto* kp = taxonomy::Find(prompt.keypoint_ids.front());
  return kp ? static_cast<std::size_t>(kp->super_category) : 0;
}

void ToyPolicyBackend::Restore(std::vector<grpo::ToyPolicy> heads,
                               std::vector<grpo::ToyPolicy> reference) {
  if (heads.size() != heads_.size() || reference.size() != heads_.size()) {
    throw Error(ErrorCode::kShapeMismatch, "checkpoint head count differs");
  }
  heads_ = std::move(heads);
  reference_ = std::move(reference);
}

std::vector<PolicySample> ToyPolicyBackend::Sample(const UserPrompt& prompt, std::size_t n,
                                                   std::uint64_t seed) const {
  const auto& head = heads_[HeadOf(prompt)];
  Rng rng(seed);
  std::vector<PolicySample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t a = greedy_ ? head.Greedy() : head.Sample(rng);
    out.push_back({rewrite::ApplyEdit(head.actions()[a], prompt.text), a, head.LogProb(a)});
  }
  return out;
}

ToyPolicyBackend::UpdateStats ToyPolicyBackend::Update(
    const std::vector<grpo::RolloutGroup>& groups, const grpo::GrpoConfig& cfg) {
  UpdateStats stats;
  if (groups.empty()) return stats;
  std::vector<std::vector<double>> grads(heads_.size());
  std::vector<std::size_t> counts(heads_.size(), 0);
  for (const auto& g : groups) {
    const auto h = HeadOf(g.prompt);
    const auto res = grpo::SurrogateLoss(g, heads_[h], reference_[h], cfg);
    if (grads[h].empty()) grads[h].assign(res.gradient.size(), 0.0);
    for (std::size_t j = 0; j < res.gradient.size(); ++j) grads[h][j] += res.gradient[j];
    ++counts[h];
    stats.loss += res.loss;
    stats.kl += res.kl;
  }
  for (std::size_t h = 0; h < heads_.size(); ++h) {
    if (counts[h] == 0) continue;
    for (double& v : grads[h]) v /= static_cast<double>(counts[h]);
    heads_[h] = grpo::Update(heads_[h], grads[h], cfg);
  }
  stats.loss /= static_cast<double>(groups.size());
  stats.kl /= static_cast<double>(groups.size());
  return stats;
}

Image MockT2iBackend::Generate(const std::string& text, std::uint64_t seed) const {
  Image img;
  img.ref = "mock-" + Hex(MixSeeds({Fnv1a(text), seed}));
  img.scene = evaluator::MockT2i(text, seed, options_);
  return img;
}

evaluator::RewardReport OracleJudgeBackend::Judge(const Image& image,
                                                  const UserPrompt& prompt) const {
  if (!image.scene) {
    throw Error(ErrorCode::kInvalidArgument, "oracle judge needs a scene graph for " + image.ref);
  }
  return evaluator::Evaluate(*image.scene, prompt);
}

ChatPolicyBackend::ChatPolicyBackend(endpoint::EndpointConfig cfg,
                                     std::optional<std::filesystem::path> template_path)
    : cfg_(std::move(cfg)), template_(assets::Load("policy_rewrite.md", template_path)) {
  cfg_.Validate();
}

std::vector<PolicySample> ChatPolicyBackend::Sample(const UserPrompt& prompt, std::size_t n,
                                                    std::uint64_t seed) const {
  std::vector<PolicySample> out(n);
  std::vector<std::future<void>> pending;
  for (std::size_t i = 0; i < n; ++i) {
    pending.push_back(std::async(std::launch::async, [&, i] {
      endpoint::ChatRequest req;
      req.messages.push_back({"user", assets::Render(template_, {{"user_prompt", prompt.text}})});
      req.logprobs = true;
      req.seed = MixSeeds({seed, i});
      const auto res = endpoint::ChatComplete(req, cfg_);
      out[i].text = text::Trim(res.text);
      if (res.token_logprobs) {
        double sum = 0.0;
        for (double lp : *res.token_logprobs) sum += lp;
        out[i].logprob = sum;
      }
    }));
  }
  std::exception_ptr first;
  for (auto& f : pending) {
    try {
      f.get();
    } catch (...) {
      if (!first) first = std::current_exception();
    }
  }
  if (first) std::rethrow_exception(first);
  return out;
}

Image HttpT2iBackend::Generate(const std::string& text, std::uint64_t seed) const {
  const auto res = endpoint::PostJson(cfg_, cfg_.path, Json{{"prompt", text}, {"seed", seed}});
  Image img;
  try {
    img.ref = res.body.at("image_ref").get<std::string>();
    if (res.body.contains("scene")) img.scene = SceneFromJson(res.body["scene"]);
  } catch (const Json::exception&) {
    throw TransportError(cfg_.base_url + ": image response lacks image_ref", false);
  }
  return img;
}

evaluator::RewardReport RemoteJudgeBackend::Judge(const Image& image,
                                                  const UserPrompt& prompt) const {
  return evaluator::RemoteEvaluate(image.ref, prompt, options_);
}

void BackendSet::Validate() const {
  if (!policy) throw Error(ErrorCode::kInvalidConfig, "backends.policy is missing");
  if (!t2i) throw Error(ErrorCode::kInvalidConfig, "backends.t2i is missing");
  if (!judge) throw Error(ErrorCode::kInvalidConfig, "backends.judge is missing");
}

bool BackendSet::hermetic() const {
  return policy && t2i && judge && policy->local() && t2i->local() && judge->local();
}

BackendSet BackendSet::Hermetic(evaluator::MockT2iOptions t2i, bool greedy) {
  return {std::make_shared<ToyPolicyBackend>(greedy), std::make_shared<MockT2iBackend>(t2i),
          std::make_shared<OracleJudgeBackend>()};
}

grpo::RolloutGroup Rollout(const UserPrompt& prompt, const BackendSet& backends,
                           const grpo::GrpoConfig& cfg, std::uint64_t seed) {
  backends.Validate();
  const std::size_t n = cfg.group_size;
  const auto samples = backends.policy->Sample(prompt, n, MixSeeds({seed, 0}));
  if (samples.size() != n) {
    throw Error(ErrorCode::kGroupAborted, "policy returned " + std::to_string(samples.size()) +
                                              " candidates, expected " + std::to_string(n));
  }
  std::vector<double> rewards(n, 0.0);
  auto score = [&](std::size_t i) {
    const auto image = backends.t2i->Generate(samples[i].text, MixSeeds({seed, 1, i}));
    rewards[i] = backends.judge->Judge(image, prompt).reward;
  };
  if (backends.t2i->local() && backends.judge->local()) {
    for (std::size_t i = 0; i < n; ++i) score(i);
  } else {
    // Remote calls are bounded by each endpoint's max_in_flight.
    std::vector<std::future<void>> pending;
    for (std::size_t i = 0; i < n; ++i) pending.push_back(std::async(std::launch::async, score, i));
    std::exception_ptr first;
    for (auto& f : pending) {
      try {
        f.get();
      } catch (...) {
        if (!first) first = std::current_exception();
      }
    }
    if (first) std::rethrow_exception(first);
  }

  grpo::RolloutGroup g;
  g.prompt = prompt;
  g.rewards = std::move(rewards);
  bool all_actions = true;
  bool all_logprobs = true;
  for (const auto& s : samples) {
    g.candidates.push_back(s.text);
    all_actions = all_actions && s.action.has_value();
    all_logprobs = all_logprobs && s.logprob.has_value();
  }
  if (all_actions) {
    for (const auto& s : samples) g.actions.push_back(*s.action);
  }
  if (all_logprobs) {
    for (const auto& s : samples) g.old_logprobs.push_back(*s.logprob);
  }
  return g;
}

Json ToJson(const EpochMetrics& m) {
  return Json{{"epoch", m.epoch},         {"batches", m.batches},
              {"groups", m.groups},       {"aborted", m.aborted},
              {"requeued", m.requeued},   {"dropped", m.dropped},
              {"updates", m.updates},     {"mean_reward", m.mean_reward},
              {"reward_std", m.reward_std}, {"mean_loss", m.mean_loss},
              {"mean_kl", m.mean_kl}};
}

namespace {

EpochMetrics MetricsFromJson(const Json& j) {
  EpochMetrics m;
  m.epoch = j.at("epoch").get<std::size_t>();
  m.batches = j.at("batches").get<std::size_t>();
  m.groups = j.at("groups").get<std::size_t>();
  m.aborted = j.at("aborted").get<std::size_t>();
  m.requeued = j.at("requeued").get<std::size_t>();
  m.dropped = j.at("dropped").get<std::size_t>();
  m.updates = j.at("updates").get<std::size_t>();
  m.mean_reward = j.at("mean_reward").get<double>();
  m.reward_std = j.at("reward_std").get<double>();
  m.mean_loss = j.at("mean_loss").get<double>();
  m.mean_kl = j.at("mean_kl").get<double>();
  return m;
}

std::string BatchId(std::size_t epoch, std::size_t batch) {
  return "e" + std::to_string(epoch) + "b" + std::to_string(batch);
}

}  // namespace

struct Pipeline::State {
  std::uint64_t prompts_digest = 0;
  std::set<std::string> completed;
  std::vector<EpochMetrics> epochs;
  // The epoch in progress.
  EpochMetrics partial;
  std::vector<double> rewards;
  std::vector<double> losses;
  std::vector<double> kls;
};

Pipeline::Pipeline(BackendSet backends, grpo::GrpoConfig cfg, RunOptions options)
    : backends_(std::move(backends)),
      cfg_(cfg),
      options_(std::move(options)),
      state_(std::make_shared<State>()) {
  backends_.Validate();
  cfg_.Validate();
  if (!options_.checkpoint || !std::filesystem::exists(*options_.checkpoint)) return;

  std::ifstream in(*options_.checkpoint);
  Json j;
  try {
    j = Json::parse(in);
    if (j.at("config") != grpo::ToJson(cfg_)) {
      throw Error(ErrorCode::kInvalidConfig,
                  "checkpoint was written with a different grpo config");
    }
    auto& s = *state_;
    s.prompts_digest = j.at("prompts_digest").get<std::uint64_t>();
    for (const auto& id : j.at("completed")) s.completed.insert(id.get<std::string>());
    for (const auto& m : j.at("epochs")) s.epochs.push_back(MetricsFromJson(m));
    s.partial = MetricsFromJson(j.at("partial"));
    s.rewards = j.at("rewards").get<std::vector<double>>();
    s.losses = j.at("losses").get<std::vector<double>>();
    s.kls = j.at("kls").get<std::vector<double>>();
    if (auto* toy = dynamic_cast<ToyPolicyBackend*>(backends_.policy.get())) {
      std::vector<grpo::ToyPolicy> heads, ref;
      for (const auto& h : j.at("policy")) heads.push_back(grpo::ToyPolicyFromJson(h));
      for (const auto& h : j.at("reference")) ref.push_back(grpo::ToyPolicyFromJson(h));
      toy->Restore(std::move(heads), std::move(ref));
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kIoError,
                "unreadable checkpoint " + options_.checkpoint->string() + ": " + e.what());
  }
  log::Logger()->info("resumed from {} ({} batches done)", options_.checkpoint->string(),
                      state_->completed.size());
}

void Pipeline::Save(const State& s) const {
  if (!options_.checkpoint) return;
  Json j{{"version", 1},
         {"config", grpo::ToJson(cfg_)},
         {"prompts_digest", s.prompts_digest},
         {"completed", s.completed},
         {"partial", ToJson(s.partial)},
         {"rewards", s.rewards},
         {"losses", s.losses},
         {"kls", s.kls}};
  j["epochs"] = Json::array();
  for (const auto& m : s.epochs) j["epochs"].push_back(ToJson(m));
  if (auto* toy = dynamic_cast<ToyPolicyBackend*>(backends_.policy.get())) {
    j["policy"] = Json::array();
    j["reference"] = Json::array();
    for (const auto& h : toy->heads()) j["policy"].push_back(grpo::ToJson(h));
    for (const auto& h : toy->reference()) j["reference"].push_back(grpo::ToJson(h));
  }
  const auto tmp = options_.checkpoint->string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << j.dump() << "\n";
    if (!out) throw Error(ErrorCode::kIoError, "cannot write checkpoint " + tmp);
  }
  std::filesystem::rename(tmp, *options_.checkpoint);
}

RunResult Pipeline::Run(const std::vector<UserPrompt>& prompts) {
  if (prompts.empty()) throw Error(ErrorCode::kInvalidArgument, "prompt set is empty");
  auto& s = *state_;
  std::uint64_t digest = Fnv1a("prompts");
  for (const auto& p : prompts) digest = Fnv1a(p.id + "\n" + p.text + "\n", digest);
  if (!s.completed.empty() && s.prompts_digest != digest) {
    throw Error(ErrorCode::kInvalidArgument, "checkpoint belongs to a different prompt set");
  }
  s.prompts_digest = digest;

  auto* toy = dynamic_cast<ToyPolicyBackend*>(backends_.policy.get());
  if (options_.preferences && s.completed.empty()) {
    std::ofstream truncate(*options_.preferences, std::ios::trunc);
  }
  const std::size_t bs = cfg_.batch_size;
  const std::size_t num_batches = (prompts.size() + bs - 1) / bs;
  std::size_t done_here = 0;

  for (std::size_t epoch = s.epochs.size(); epoch < cfg_.epochs; ++epoch) {
    std::vector<std::size_t> order(prompts.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    Rng shuffle(MixSeeds({cfg_.seed, epoch, 0x5eedULL}));
    for (std::size_t i = order.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(shuffle.UniformInt(0, static_cast<std::int64_t>(i) - 1));
      std::swap(order[i - 1], order[j]);
    }
    s.partial.epoch = epoch;

    for (std::size_t b = 0; b < num_batches; ++b) {
      const auto id = BatchId(epoch, b);
      if (s.completed.count(id)) continue;
      const std::vector<std::size_t> members(
          order.begin() + static_cast<std::ptrdiff_t>(b * bs),
          order.begin() + static_cast<std::ptrdiff_t>(std::min(prompts.size(), (b + 1) * bs)));

      std::vector<std::optional<grpo::RolloutGroup>> groups(members.size());
      std::vector<std::size_t> pending(members.size());
      for (std::size_t i = 0; i < pending.size(); ++i) pending[i] = i;
      for (std::uint64_t attempt = 0; attempt < 2 && !pending.empty(); ++attempt) {
        ParallelFor(pending.size(), options_.workers, [&](std::size_t k) {
          const auto slot = pending[k];
          const auto p = members[slot];
          try {
            groups[slot] = Rollout(prompts[p], backends_, cfg_,
                                   MixSeeds({cfg_.seed, epoch, p, attempt}));
          } catch (const std::exception& e) {
            log::Logger()->warn("group for {} aborted (attempt {}): {}", prompts[p].id,
                                attempt + 1, e.what());
          }
        });
        std::vector<std::size_t> failed;
        for (auto slot : pending) {
          if (!groups[slot]) failed.push_back(slot);
        }
        s.partial.aborted += failed.size();
        if (attempt == 0) {
          s.partial.requeued += failed.size();
        } else {
          s.partial.dropped += failed.size();
        }
        pending = std::move(failed);
      }

      std::vector<grpo::RolloutGroup> complete;
      for (auto& g : groups) {
        if (g) complete.push_back(std::move(*g));
      }
      for (const auto& g : complete) {
        s.rewards.insert(s.rewards.end(), g.rewards.begin(), g.rewards.end());
      }
      s.partial.groups += complete.size();
      if (toy) {
        if (!complete.empty()) {
          const auto stats = toy->Update(complete, cfg_);
          s.losses.push_back(stats.loss);
          s.kls.push_back(stats.kl);
          ++s.partial.updates;
        }
      } else if (options_.preferences) {
        std::ofstream out(*options_.preferences, std::ios::app);
        for (const auto& g : complete) {
          Json rec{{"prompt_id", g.prompt.id},
                   {"candidates", g.candidates},
                   {"rewards", g.rewards},
                   {"advantages", grpo::Advantages(g.rewards, cfg_)}};
          out << rec.dump() << "\n";
        }
        if (!out) throw Error(ErrorCode::kIoError, "cannot append preference records");
      }
      ++s.partial.batches;
      s.completed.insert(id);

      if (b + 1 == num_batches) {
        auto m = s.partial;
        double sum = 0.0;
        for (double r : s.rewards) sum += r;
        const double n = static_cast<double>(s.rewards.size());
        m.mean_reward = s.rewards.empty() ? 0.0 : sum / n;
        double sq = 0.0;
        for (double r : s.rewards) sq += (r - m.mean_reward) * (r - m.mean_reward);
        m.reward_std = s.rewards.empty() ? 0.0 : std::sqrt(sq / n);
        auto mean = [](const std::vector<double>& v) {
          double t = 0.0;
          for (double x : v) t += x;
          return v.empty() ? 0.0 : t / static_cast<double>(v.size());
        };
        m.mean_loss = mean(s.losses);
        m.mean_kl = mean(s.kls);
        s.epochs.push_back(m);
        log::Logger()->info("epoch {} mean_reward={:.4f} std={:.4f} aborted={}", epoch,
                            m.mean_reward, m.reward_std, m.aborted);
        s.partial = EpochMetrics{};
        s.partial.epoch = epoch + 1;
        s.rewards.clear();
        s.losses.clear();
        s.kls.clear();
      }
      Save(s);
      ++done_here;
      if (options_.stop_after_batches && done_here >= *options_.stop_after_batches) {
        return {s.epochs, false};
      }
    }
  }
  return {s.epochs, true};
}

MockPipelineEnv::MockPipelineEnv(std::vector<UserPrompt> prompts, evaluator::MockT2iOptions t2i)
    : prompts_(std::move(prompts)), t2i_(t2i) {
  if (prompts_.empty()) throw Error(ErrorCode::kInvalidArgument, "mock pipeline needs prompts");
}

std::size_t MockPipelineEnv::HeadOf(std::size_t prompt) const {
  return ToyPolicyBackend::HeadOf(prompts_.at(prompt));
}

std::vector<std::string> MockPipelineEnv::Actions() const { return rewrite::ToyActions(); }

double MockPipelineEnv::Reward(std::size_t prompt, std::size_t action, std::uint64_t seed) const {
  const auto& p = prompts_.at(prompt);
  const auto text = rewrite::ApplyEdit(rewrite::ToyActions().at(action), p.text);
  return evaluator::Evaluate(evaluator::MockT2i(text, seed, t2i_), p).reward;
}

}  // namespace promptalign::orchestrator
