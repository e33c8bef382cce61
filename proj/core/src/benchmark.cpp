// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#include "promptalign/benchmark.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "promptalign/error.hpp"
#include "promptalign/log.hpp"
#include "promptalign/rewrite.hpp"
#include "promptalign/rng.hpp"
#include "promptalign/taxonomy.hpp"
#include "promptalign/text_util.hpp"
#include "internal.hpp"

namespace promptalign::benchmark {

namespace {

constexpr int kSchemaVersion = 1;

std::string Fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string Pad(std::string s, std::size_t width, bool right = false) {
  if (s.size() >= width) return s;
  const std::string fill(width - s.size(), ' ');
  return right ? fill + s : s + fill;
}

}  // namespace

std::optional<double> KeypointAccuracy::accuracy() const {
  if (n_instances == 0) return std::nullopt;
  return static_cast<double>(n_pass) / static_cast<double>(n_instances);
}

AccuracyTable::AccuracyTable() {
  for (const auto& kp : taxonomy::Registry()) rows.push_back({kp.id, 0, 0});
}

KeypointAccuracy& AccuracyTable::row(std::string_view keypoint_id) {
  const auto idx = taxonomy::IndexOf(keypoint_id);
  if (!idx) taxonomy::Lookup(keypoint_id);  // throws UnknownKeyPoint
  return rows[*idx];
}

const KeypointAccuracy& AccuracyTable::row(std::string_view keypoint_id) const {
  return const_cast<AccuracyTable*>(this)->row(keypoint_id);
}

std::optional<double> AccuracyTable::overall_mean() const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : rows) {
    if (auto a = r.accuracy()) {
      sum += *a;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

Json ToJson(const AccuracyTable& t) {
  Json kps = Json::object();
  for (const auto& r : t.rows) {
    const auto acc = r.accuracy();
    kps[r.keypoint_id] = Json{{"n", r.n_instances}, {"pass", r.n_pass},
                              {"acc", acc ? Json(*acc) : Json(nullptr)}};
  }
  const auto mean = t.overall_mean();
  return Json{{"schema_version", kSchemaVersion},
              {"keypoints", kps},
              {"overall_mean", mean ? Json(*mean) : Json(nullptr)},
              {"records", t.n_records},
              {"errored", t.n_errored}};
}

AccuracyTable AccuracyTableFromJson(const Json& j) {
  if (!j.is_object() || !j.contains("keypoints") || !j["keypoints"].is_object()) {
    throw SchemaError("keypoints", "expected an object keyed by keypoint id");
  }
  AccuracyTable t;
  for (const auto& [id, v] : j["keypoints"].items()) {
    auto& row = t.row(id);
    try {
      row.n_instances = v.at("n").get<std::size_t>();
      row.n_pass = v.at("pass").get<std::size_t>();
    } catch (const Json::exception&) {
      throw SchemaError("keypoints." + id, "needs integer n and pass");
    }
    if (row.n_pass > row.n_instances) throw SchemaError("keypoints." + id, "pass exceeds n");
  }
  if (j.contains("records")) t.n_records = j["records"].get<std::size_t>();
  if (j.contains("errored")) t.n_errored = j["errored"].get<std::size_t>();
  return t;
}

AccuracyTable Tabulate(std::span<const Instance> instances) {
  AccuracyTable t;
  for (const auto& in : instances) {
    auto& row = t.row(in.keypoint_id);
    ++row.n_instances;
    if (in.pass) ++row.n_pass;
  }
  return t;
}

// ---- evaluation ----

FixedEditPolicy::FixedEditPolicy(std::string edit) : edit_(std::move(edit)) {
  rewrite::ApplyEdit(edit_, "");  // rejects unknown edits
}

std::vector<orchestrator::PolicySample> FixedEditPolicy::Sample(const UserPrompt& prompt,
                                                                std::size_t n,
                                                                std::uint64_t) const {
  return std::vector<orchestrator::PolicySample>(
      n, orchestrator::PolicySample{rewrite::ApplyEdit(edit_, prompt.text), 0, 0.0});
}

EvaluateResult Evaluate(std::span<const BenchmarkRecord> dataset,
                        const orchestrator::T2iBackend& generator,
                        const orchestrator::JudgeBackend& judge, const EvaluateOptions& options) {
  for (const auto& r : dataset) {
    for (const auto& k : r.keypoint_ids) taxonomy::Lookup(k);
    if (auto p = Check(r)) {
      throw Error(ErrorCode::kSchemaViolation, "record " + r.id + ": " + p->field + ": " + p->reason);
    }
  }
  std::vector<std::optional<evaluator::RewardReport>> slots(dataset.size());
  std::vector<std::string> errors(dataset.size());
  const bool local = generator.local() && judge.local() &&
                     (options.rewriter == nullptr || options.rewriter->local());
  internal::ParallelFor(dataset.size(), local ? 1 : options.workers, [&](std::size_t i) {
    const auto& r = dataset[i];
    UserPrompt prompt;
    prompt.id = r.id;
    prompt.text = r.prompt;
    prompt.language = r.language;
    prompt.keypoint_ids = r.keypoint_ids;
    const auto seed = MixSeeds({options.seed, Fnv1a(r.id)});
    try {
      std::string text = prompt.text;
      if (options.rewriter) text = options.rewriter->Sample(prompt, 1, seed).at(0).text;
      const auto image = generator.Generate(text, MixSeeds({seed, 1}));
      auto report = judge.Judge(image, prompt);
      report.record_id = r.id;
      slots[i] = std::move(report);
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });
  EvaluateResult out;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    if (!slots[i]) {
      log::Logger()->warn("record {} errored: {}", dataset[i].id, errors[i]);
      out.errored_ids.push_back(dataset[i].id);
      continue;
    }
    for (const auto& v : slots[i]->verdicts) {
      auto& row = out.table.row(v.keypoint_id);
      ++row.n_instances;
      if (v.pass) ++row.n_pass;
    }
    out.reports.push_back(std::move(*slots[i]));
  }
  out.table.n_records = dataset.size() - out.errored_ids.size();
  out.table.n_errored = out.errored_ids.size();
  return out;
}

// ---- deltas ----

DeltaReport Compare(const AccuracyTable& baseline, const AccuracyTable& enhanced) {
  std::vector<std::string> only_base, only_enh;
  for (std::size_t i = 0; i < baseline.rows.size(); ++i) {
    const bool b = baseline.rows[i].present();
    const bool e = enhanced.rows[i].present();
    if (b && !e) only_base.push_back(baseline.rows[i].keypoint_id);
    if (e && !b) only_enh.push_back(enhanced.rows[i].keypoint_id);
  }
  if (!only_base.empty() || !only_enh.empty()) {
    std::string msg = "keypoint sets differ";
    if (!only_base.empty()) msg += "; baseline only: " + text::Join(only_base, ",");
    if (!only_enh.empty()) msg += "; enhanced only: " + text::Join(only_enh, ",");
    throw Error(ErrorCode::kKeypointSetMismatch, msg);
  }
  DeltaReport r;
  double sum = 0.0;
  for (std::size_t i = 0; i < baseline.rows.size(); ++i) {
    const auto b = baseline.rows[i].accuracy();
    if (!b) continue;
    const auto e = *enhanced.rows[i].accuracy();
    DeltaRow row{baseline.rows[i].keypoint_id, *b, e, (e - *b) * 100.0};
    sum += row.delta_pp;
    if (row.delta_pp > kZeroTolerancePp) {
      ++r.n_positive;
    } else if (row.delta_pp < -kZeroTolerancePp) {
      ++r.n_negative;
    } else {
      ++r.n_zero;
    }
    if (row.delta_pp > 5.0 + kZeroTolerancePp) ++r.n_above_5pp;
    r.rows.push_back(std::move(row));
  }
  if (!r.rows.empty()) r.mean_delta_pp = sum / static_cast<double>(r.rows.size());
  return r;
}

Json ToJson(const DeltaReport& r) {
  Json rows = Json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"keypoint_id", row.keypoint_id},
                    {"baseline", row.baseline},
                    {"enhanced", row.enhanced},
                    {"delta_pp", row.delta_pp}});
  }
  return Json{{"schema_version", kSchemaVersion}, {"rows", rows},
              {"mean_delta_pp", r.mean_delta_pp}, {"n_positive", r.n_positive},
              {"n_zero", r.n_zero},               {"n_negative", r.n_negative},
              {"n_above_5pp", r.n_above_5pp}};
}

DeltaReport DeltaReportFromJson(const Json& j) {
  DeltaReport r;
  try {
    for (const auto& row : j.at("rows")) {
      const auto id = row.at("keypoint_id").get<std::string>();
      taxonomy::Lookup(id);
      r.rows.push_back({id, row.at("baseline").get<double>(), row.at("enhanced").get<double>(),
                        row.at("delta_pp").get<double>()});
    }
    r.mean_delta_pp = j.at("mean_delta_pp").get<double>();
    r.n_positive = j.at("n_positive").get<std::size_t>();
    r.n_zero = j.at("n_zero").get<std::size_t>();
    r.n_negative = j.at("n_negative").get<std::size_t>();
    r.n_above_5pp = j.at("n_above_5pp").get<std::size_t>();
  } catch (const Json::exception& e) {
    throw SchemaError("delta_report", e.what());
  }
  return r;
}

// ---- rendering ----

Format ParseFormat(std::string_view s) {
  if (s == "text") return Format::kText;
  if (s == "json") return Format::kJson;
  if (s == "csv") return Format::kCsv;
  throw Error(ErrorCode::kUnsupportedFormat, "unsupported format '" + std::string(s) + "'");
}

std::string FormatPp(double pp) {
  const double r = std::round(pp * 10.0) / 10.0;
  if (r == 0.0) return "0.0";
  return (r > 0 ? "+" : "") + Fixed(r, 1);
}

std::string Render(const DeltaReport& r, Format f) {
  std::ostringstream os;
  switch (f) {
    case Format::kJson:
      os << ToJson(r).dump(2) << "\n";
      break;
    case Format::kCsv:
      os << "keypoint_id,baseline_pct,enhanced_pct,delta_pp\n";
      for (const auto& row : r.rows) {
        os << row.keypoint_id << "," << Fixed(row.baseline * 100.0, 1) << ","
           << Fixed(row.enhanced * 100.0, 1) << "," << FormatPp(row.delta_pp) << "\n";
      }
      os << "mean,,," << FormatPp(r.mean_delta_pp) << "\n";
      break;
    case Format::kText:
      os << Pad("keypoint", 26) << Pad("baseline", 10, true) << Pad("enhanced", 10, true)
         << Pad("delta", 8, true) << "\n";
      for (const auto& row : r.rows) {
        os << Pad(row.keypoint_id, 26) << Pad(Fixed(row.baseline * 100.0, 1) + "%", 10, true)
           << Pad(Fixed(row.enhanced * 100.0, 1) + "%", 10, true)
           << Pad(FormatPp(row.delta_pp), 8, true) << "\n";
      }
      os << "mean delta " << FormatPp(r.mean_delta_pp) << " pp over " << r.rows.size()
         << " keypoints\n";
      os << "positive " << r.n_positive << ", zero " << r.n_zero << ", negative " << r.n_negative
         << ", above 5.0 pp " << r.n_above_5pp << "\n";
      break;
  }
  return os.str();
}

std::string Render(const AccuracyTable& t, Format f) {
  std::ostringstream os;
  const auto mean = t.overall_mean();
  switch (f) {
    case Format::kJson:
      os << ToJson(t).dump(2) << "\n";
      break;
    case Format::kCsv:
      os << "keypoint_id,n_instances,n_pass,accuracy_pct\n";
      for (const auto& r : t.rows) {
        const auto a = r.accuracy();
        os << r.keypoint_id << "," << r.n_instances << "," << r.n_pass << ","
           << (a ? Fixed(*a * 100.0, 1) : std::string()) << "\n";
      }
      os << "mean,,," << (mean ? Fixed(*mean * 100.0, 1) : std::string()) << "\n";
      break;
    case Format::kText:
      os << Pad("keypoint", 26) << Pad("n", 7, true) << Pad("pass", 7, true)
         << Pad("accuracy", 10, true) << "\n";
      for (const auto& r : t.rows) {
        const auto a = r.accuracy();
        os << Pad(r.keypoint_id, 26) << Pad(std::to_string(r.n_instances), 7, true)
           << Pad(std::to_string(r.n_pass), 7, true)
           << Pad(a ? Fixed(*a * 100.0, 1) + "%" : "absent", 10, true) << "\n";
      }
      os << "mean accuracy " << (mean ? Fixed(*mean * 100.0, 1) + "%" : "n/a") << " over "
         << t.n_records << " records";
      if (t.n_errored) os << " (" << t.n_errored << " errored, excluded)";
      os << "\n";
      break;
  }
  return os.str();
}

// ---- analytics ----

Analysis Analyze(std::span<const BenchmarkRecord> dataset, std::size_t top_k) {
  Analysis a;
  const auto items = corpus::ToStatsItems(dataset);
  a.stats = corpus::DatasetStats(items);
  a.cooccurrence = corpus::Cooccurrence(dataset, top_k);
  a.density_mode = corpus::DensityMode(a.stats.density_histogram);
  return a;
}

Json ToJson(const Analysis& a) {
  return Json{{"schema_version", kSchemaVersion},
              {"stats", corpus::ToJson(a.stats)},
              {"cooccurrence", corpus::ToJson(a.cooccurrence)},
              {"density_mode", a.density_mode ? Json(*a.density_mode) : Json(nullptr)}};
}

std::string Render(const Analysis& a, Format f) {
  std::ostringstream os;
  switch (f) {
    case Format::kJson:
      os << ToJson(a).dump(2) << "\n";
      break;
    case Format::kCsv:
      os << "keypoint";
      for (const auto& k : a.cooccurrence.keypoints) os << "," << k;
      os << "\n";
      for (std::size_t i = 0; i < a.cooccurrence.keypoints.size(); ++i) {
        os << a.cooccurrence.keypoints[i];
        for (auto c : a.cooccurrence.counts[i]) os << "," << c;
        os << "\n";
      }
      break;
    case Format::kText:
      os << corpus::RenderTable(a.stats);
      os << "density mode: " << (a.density_mode ? std::to_string(*a.density_mode) : "n/a") << "\n";
      os << "co-occurrence (top " << a.cooccurrence.keypoints.size() << "):\n";
      for (std::size_t i = 0; i < a.cooccurrence.keypoints.size(); ++i) {
        os << Pad(a.cooccurrence.keypoints[i], 26);
        for (auto c : a.cooccurrence.counts[i]) os << Pad(std::to_string(c), 6, true);
        os << "\n";
      }
      break;
  }
  return os.str();
}

}  // namespace promptalign::benchmark
