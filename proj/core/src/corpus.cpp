// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#include "promptalign/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include "promptalign/taxonomy.hpp"
#include "promptalign/text_util.hpp"

namespace promptalign::corpus {

std::optional<RecordKind> ParseRecordKind(std::string_view s) {
  if (s == "user-prompt" || s == "prompt") return RecordKind::kUserPrompt;
  if (s == "sft-triplet" || s == "triplet") return RecordKind::kSftTriplet;
  if (s == "benchmark") return RecordKind::kBenchmark;
  if (s == "verdict") return RecordKind::kVerdict;
  return std::nullopt;
}

std::string SerializeLine(const Json& j) {
  // Replace invalid UTF-8 instead of throwing mid-file.
  return j.dump(-1, ' ', false, Json::error_handler_t::replace) + "\n";
}

std::vector<StatsItem> ToStatsItems(std::span<const BenchmarkRecord> records) {
  std::vector<StatsItem> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    out.push_back({r.prompt, r.language, std::nullopt, r.keypoint_ids.size()});
  }
  return out;
}

std::vector<StatsItem> ToStatsItems(std::span<const UserPrompt> records) {
  std::vector<StatsItem> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    out.push_back({r.text, r.language, r.theme, r.keypoint_ids.size()});
  }
  return out;
}

std::vector<StatsItem> ToStatsItems(std::span<const SftTriplet> records) {
  std::vector<StatsItem> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    const auto& p = r.user_prompt;
    out.push_back({p.text, p.language, p.theme, p.keypoint_ids.size()});
  }
  return out;
}

StatsReport DatasetStats(std::span<const StatsItem> items, std::size_t bin_width) {
  StatsReport report;
  report.length_bin_width = std::max<std::size_t>(1, bin_width);
  report.total = items.size();
  if (items.empty()) return report;

  std::map<Language, std::size_t> length_sum;
  std::size_t themed = 0;
  for (const auto& item : items) {
    const auto len = text::CharLength(item.text);
    ++report.language_counts[item.language];
    length_sum[item.language] += len;
    ++report.length_histogram[(len / report.length_bin_width) * report.length_bin_width];
    ++report.density_histogram[item.keypoint_count];
    if (item.theme) {
      ++report.theme_counts[*item.theme];
      ++themed;
    }
  }
  const auto total = static_cast<double>(report.total);
  for (const auto& [lang, n] : report.language_counts) {
    report.language_percent[lang] = 100.0 * static_cast<double>(n) / total;
    report.mean_length[lang] =
        static_cast<double>(length_sum[lang]) / static_cast<double>(n);
  }
  for (const auto& [theme, n] : report.theme_counts) {
    report.theme_percent[theme] =
        100.0 * static_cast<double>(n) / static_cast<double>(themed);
  }
  return report;
}

namespace {

double Round1(double v) { return std::round(v * 10.0) / 10.0; }

}  // namespace

Json ToJson(const StatsReport& r) {
  Json j;
  j["total"] = r.total;
  Json langs = Json::object();
  for (const auto& [lang, n] : r.language_counts) {
    langs[std::string(ToString(lang))] = {
        {"count", n},
        {"percent", Round1(r.language_percent.at(lang))},
        {"mean_length", r.mean_length.at(lang)}};
  }
  j["languages"] = std::move(langs);
  j["length_bin_width"] = r.length_bin_width;
  Json lengths = Json::array();
  for (const auto& [bin, n] : r.length_histogram) lengths.push_back({bin, n});
  j["length_histogram"] = std::move(lengths);
  Json density = Json::array();
  for (const auto& [d, n] : r.density_histogram) density.push_back({d, n});
  j["density_histogram"] = std::move(density);
  Json themes = Json::object();
  for (const auto& [t, n] : r.theme_counts) {
    themes[std::string(ToString(t))] = {{"count", n},
                                         {"percent", Round1(r.theme_percent.at(t))}};
  }
  j["themes"] = std::move(themes);
  return j;
}

std::string RenderTable(const StatsReport& r) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(1);
  out << "records: " << r.total << "\n\nlanguage  count  percent  mean_chars\n";
  for (const auto& [lang, n] : r.language_counts) {
    out << std::left << std::setw(10) << ToString(lang) << std::setw(7) << n
        << std::setw(9) << r.language_percent.at(lang) << r.mean_length.at(lang)
        << "\n";
  }
  out << "\nkeypoints/prompt  count\n";
  for (const auto& [d, n] : r.density_histogram) {
    out << std::left << std::setw(18) << d << n << "\n";
  }
  out << "\nlength(chars)  count\n";
  for (const auto& [bin, n] : r.length_histogram) {
    std::ostringstream label;
    label << bin << "-" << bin + r.length_bin_width - 1;
    out << std::left << std::setw(15) << label.str() << n << "\n";
  }
  if (!r.theme_counts.empty()) {
    out << "\ntheme         count  percent\n";
    for (const auto& [t, n] : r.theme_counts) {
      out << std::left << std::setw(14) << ToString(t) << std::setw(7) << n
          << r.theme_percent.at(t) << "\n";
    }
  }
  return out.str();
}

std::optional<std::size_t> DensityMode(const std::map<std::size_t, std::size_t>& hist) {
  std::optional<std::size_t> mode;
  std::size_t best = 0;
  for (const auto& [d, n] : hist) {
    if (n > best) {
      best = n;
      mode = d;
    }
  }
  return mode;
}

CooccurrenceMatrix Cooccurrence(std::span<const std::vector<std::string>> sets,
                                std::size_t top_k) {
  if (top_k == 0) throw Error(ErrorCode::kInvalidArgument, "top_k must be >= 1");

  // Rank key: taxonomy position, then unknown ids lexically after all 24.
  auto rank = [](const std::string& id) {
    const auto idx = taxonomy::IndexOf(id);
    return std::pair<std::size_t, std::string>{idx ? *idx : kNumKeyPoints,
                                               idx ? std::string() : id};
  };

  std::vector<std::set<std::string>> uniq;
  uniq.reserve(sets.size());
  std::map<std::string, std::size_t> freq;
  for (const auto& s : sets) {
    uniq.emplace_back(s.begin(), s.end());
    for (const auto& id : uniq.back()) ++freq[id];
  }
  for (const auto& kp : taxonomy::Registry()) freq.try_emplace(kp.id, 0);

  std::vector<std::string> order;
  for (const auto& [id, n] : freq) order.push_back(id);
  std::sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
    if (freq[a] != freq[b]) return freq[a] > freq[b];
    return rank(a) < rank(b);
  });
  const std::size_t k = std::min(top_k, order.size());
  order.resize(k);

  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < k; ++i) index[order[i]] = i;

  CooccurrenceMatrix m;
  m.keypoints = order;
  m.counts.assign(k, std::vector<std::size_t>(k, 0));
  std::vector<std::size_t> present;
  for (const auto& s : uniq) {
    present.clear();
    for (const auto& id : s) {
      auto it = index.find(id);
      if (it != index.end()) present.push_back(it->second);
    }
    for (auto i : present) {
      for (auto j : present) ++m.counts[i][j];
    }
  }
  return m;
}

CooccurrenceMatrix Cooccurrence(std::span<const BenchmarkRecord> records,
                                std::size_t top_k) {
  std::vector<std::vector<std::string>> sets;
  sets.reserve(records.size());
  for (const auto& r : records) sets.push_back(r.keypoint_ids);
  return Cooccurrence(sets, top_k);
}

Json ToJson(const CooccurrenceMatrix& m) {
  return Json{{"keypoints", m.keypoints}, {"counts", m.counts}};
}

}  // namespace promptalign::corpus
