// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

// Straight-line restatement of the clipped, KL-penalised group objective,
// written without the library so finite differences have an independent
// target.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "promptalign/rng.hpp"

namespace promptalign::testing {

inline std::vector<double> NaiveSoftmax(const std::vector<double>& z) {
  double total = 0.0;
  std::vector<double> e(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    e[i] = std::exp(z[i]);
    total += e[i];
  }
  for (double& v : e) v /= total;
  return e;
}

inline std::vector<double> NaiveAdvantages(const std::vector<double>& r, double eps) {
  const double n = static_cast<double>(r.size());
  double sum = 0.0;
  for (double v : r) sum += v;
  const double mean = sum / n;
  double sq = 0.0;
  for (double v : r) sq += (v - mean) * (v - mean);
  const double sd = std::sqrt(sq / n);
  std::vector<double> out(r.size(), 0.0);
  if (sd < eps) return out;
  for (std::size_t i = 0; i < r.size(); ++i) out[i] = (r[i] - mean) / sd;
  return out;
}

struct ReferenceInstance {
  std::vector<double> logits;
  std::vector<double> ref_logits;
  std::vector<std::size_t> actions;
  std::vector<double> rewards;
  std::vector<double> old_logprobs;
  double beta = 0.0;
  double clip = 0.2;
};

inline double ReferenceLoss(const ReferenceInstance& in, const std::vector<double>& logits) {
  const auto pi = NaiveSoftmax(logits);
  const auto q = NaiveSoftmax(in.ref_logits);
  const auto adv = NaiveAdvantages(in.rewards, 1e-8);
  double obj = 0.0;
  for (std::size_t i = 0; i < in.actions.size(); ++i) {
    const double ratio = pi[in.actions[i]] / std::exp(in.old_logprobs[i]);
    const double clipped = std::min(std::max(ratio, 1.0 - in.clip), 1.0 + in.clip);
    obj += std::min(ratio * adv[i], clipped * adv[i]);
  }
  double kl = 0.0;
  for (std::size_t j = 0; j < pi.size(); ++j) kl += pi[j] * std::log(pi[j] / q[j]);
  return -obj / static_cast<double>(in.actions.size()) + in.beta * kl;
}

// Random instance whose ratios keep at least `margin` away from the clip
// boundaries, where the objective is not differentiable.
inline ReferenceInstance RandomInstance(Rng& rng, double margin = 1e-3) {
  ReferenceInstance in;
  const auto k = static_cast<std::size_t>(rng.UniformInt(2, 6));
  const auto n = static_cast<std::size_t>(rng.UniformInt(2, 10));
  for (std::size_t j = 0; j < k; ++j) {
    in.logits.push_back(rng.Uniform() * 4.0 - 2.0);
    in.ref_logits.push_back(rng.Uniform() * 4.0 - 2.0);
  }
  in.beta = rng.Uniform() < 0.2 ? 0.0 : rng.Uniform();
  in.clip = 0.05 + rng.Uniform() * 0.3;
  const auto pi = NaiveSoftmax(in.logits);
  for (std::size_t i = 0; i < n; ++i) {
    const auto a = static_cast<std::size_t>(rng.UniformInt(0, static_cast<std::int64_t>(k) - 1));
    in.actions.push_back(a);
    in.rewards.push_back(rng.Uniform() < 0.3 ? 1.0 : rng.Uniform());
    double ratio = 0.0;
    do {
      ratio = 0.5 + rng.Uniform();
    } while (std::abs(ratio - (1.0 - in.clip)) < margin ||
             std::abs(ratio - (1.0 + in.clip)) < margin);
    in.old_logprobs.push_back(std::log(pi[a] / ratio));
  }
  return in;
}

}  // namespace promptalign::testing
