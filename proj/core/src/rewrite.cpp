// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#include "promptalign/rewrite.hpp"

#include <set>

#include "promptalign/error.hpp"
#include "promptalign/scene_parser.hpp"
#include "promptalign/text_util.hpp"

namespace promptalign::rewrite {

namespace {

std::string Clarify(const std::string& sentence) {
  return std::string(grammar::kClarifyMarker) + ", " + sentence;
}

std::string Rejoin(const std::vector<std::string>& sentences) {
  return text::Join(sentences, " ");
}

std::string ExactCounts(std::string_view prompt) {
  static const std::set<std::string> kNumbers = {
      "one",     "two",      "three",    "four",     "five",      "six",      "seven",
      "eight",   "nine",     "ten",      "eleven",   "twelve",    "thirteen", "fourteen",
      "fifteen", "sixteen",  "seventeen", "eighteen", "nineteen", "twenty"};
  std::string out;
  std::string word;
  bool prev_exactly = false;
  auto flush = [&] {
    if (word.empty()) return;
    const auto lower = text::ToLowerAscii(word);
    const bool digits = word.find_first_not_of("0123456789") == std::string::npos;
    if ((kNumbers.count(lower) || digits) && !prev_exactly) out += "exactly ";
    prev_exactly = lower == "exactly";
    out += word;
    word.clear();
  };
  for (char c : prompt) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
        static_cast<unsigned char>(c) >= 0x80) {
      word.push_back(c);
    } else {
      flush();
      out.push_back(c);
    }
  }
  flush();
  return out;
}

}  // namespace

const std::vector<std::string>& ToyActions() {
  static const std::vector<std::string> kActions = {
      "identity", "clarify-first", "clarify-last", "clarify-all", "exact-counts", "quality-tags"};
  return kActions;
}

std::string ApplyEdit(std::string_view edit, std::string_view prompt) {
  if (edit == "identity") return std::string(prompt);
  if (edit == "exact-counts") return ExactCounts(prompt);
  if (edit == "quality-tags") {
    auto base = std::string(text::Trim(prompt));
    if (base.empty()) return "Highly detailed, sharp focus.";
    const bool closed = base.back() == '.' || base.back() == '!' || base.back() == '?' ||
                        base.ends_with("\u3002") || base.ends_with("\uff01") ||
                        base.ends_with("\uff1f");
    return base + (closed ? "" : ".") + " Highly detailed, sharp focus.";
  }
  auto sentences = grammar::SplitSentences(prompt);
  if (sentences.empty()) return std::string(prompt);
  if (edit == "clarify-first") {
    sentences.front() = Clarify(sentences.front());
  } else if (edit == "clarify-last") {
    sentences.back() = Clarify(sentences.back());
  } else if (edit == "clarify-all") {
    for (auto& s : sentences) s = Clarify(s);
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown rewrite edit " + std::string(edit));
  }
  return Rejoin(sentences);
}

}  // namespace promptalign::rewrite
