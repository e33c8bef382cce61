// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#include "promptalign/text_util.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <utility>

namespace promptalign::text {

char32_t DecodeAt(std::string_view s, std::size_t& pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  int extra = 0;
  char32_t cp = 0;
  if (b0 < 0x80) {
    cp = b0;
  } else if ((b0 & 0xE0) == 0xC0) {
    cp = b0 & 0x1F;
    extra = 1;
  } else if ((b0 & 0xF0) == 0xE0) {
    cp = b0 & 0x0F;
    extra = 2;
  } else if ((b0 & 0xF8) == 0xF0) {
    cp = b0 & 0x07;
    extra = 3;
  } else {
    // Stray continuation byte: consume it as U+FFFD.
    ++pos;
    return 0xFFFD;
  }
  ++pos;
  for (int i = 0; i < extra; ++i) {
    if (pos >= s.size() ||
        (static_cast<unsigned char>(s[pos]) & 0xC0) != 0x80) {
      return 0xFFFD;
    }
    cp = (cp << 6) | (static_cast<unsigned char>(s[pos]) & 0x3F);
    ++pos;
  }
  return cp;
}

std::size_t CharLength(std::string_view s) {
  std::size_t n = 0;
  for (std::size_t pos = 0; pos < s.size();) {
    DecodeAt(s, pos);
    ++n;
  }
  return n;
}

std::vector<std::string> CodePoints(std::string_view s) {
  std::vector<std::string> out;
  for (std::size_t pos = 0; pos < s.size();) {
    const std::size_t start = pos;
    DecodeAt(s, pos);
    out.emplace_back(s.substr(start, pos - start));
  }
  return out;
}

bool IsCjk(char32_t cp) {
  return (cp >= 0x4E00 && cp <= 0x9FFF) || (cp >= 0x3400 && cp <= 0x4DBF) ||
         (cp >= 0x20000 && cp <= 0x2A6DF) || (cp >= 0xF900 && cp <= 0xFAFF);
}

bool ContainsCjk(std::string_view s) {
  for (std::size_t pos = 0; pos < s.size();) {
    if (IsCjk(DecodeAt(s, pos))) return true;
  }
  return false;
}

std::string ToLowerAscii(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string Trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string TruncateChars(std::string_view s, std::size_t max_chars) {
  std::size_t pos = 0;
  std::size_t n = 0;
  while (pos < s.size() && n < max_chars) {
    DecodeAt(s, pos);
    ++n;
  }
  if (pos >= s.size()) return std::string(s);
  std::string_view kept = s.substr(0, pos);
  const auto space = kept.find_last_of(' ');
  if (space != std::string_view::npos && space > 0) kept = kept.substr(0, space);
  return Trim(kept);
}

namespace {

bool IsWordByte(unsigned char c) {
  return std::isalnum(c) || c == '-' || c == '#' || c == '\'';
}

}  // namespace

std::vector<std::string> Tokenize(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) {
      // Strip possessive/quote apostrophes at word edges.
      while (!cur.empty() && cur.back() == '\'') cur.pop_back();
      while (!cur.empty() && cur.front() == '\'') cur.erase(cur.begin());
      if (!cur.empty()) out.push_back(ToLowerAscii(cur));
      cur.clear();
    }
  };
  for (std::size_t pos = 0; pos < s.size();) {
    const auto c = static_cast<unsigned char>(s[pos]);
    if (c < 0x80) {
      if (IsWordByte(c)) {
        cur.push_back(static_cast<char>(c));
      } else {
        flush();
      }
      ++pos;
      continue;
    }
    const std::size_t start = pos;
    const char32_t cp = DecodeAt(s, pos);
    flush();
    if (IsCjk(cp)) out.emplace_back(s.substr(start, pos - start));
  }
  flush();
  return out;
}

std::string Singularize(std::string_view word) {
  static const std::array<std::pair<std::string_view, std::string_view>, 12>
      kIrregular = {{{"people", "person"},
                     {"men", "man"},
                     {"women", "woman"},
                     {"children", "child"},
                     {"mice", "mouse"},
                     {"geese", "goose"},
                     {"feet", "foot"},
                     {"teeth", "tooth"},
                     {"leaves", "leaf"},
                     {"knives", "knife"},
                     {"wolves", "wolf"},
                     {"fish", "fish"}}};
  for (const auto& [plural, single] : kIrregular) {
    if (word == plural) return std::string(single);
  }
  std::string w(word);
  const auto ends = [&](std::string_view suf) {
    return w.size() > suf.size() + 1 &&
           w.compare(w.size() - suf.size(), suf.size(), suf) == 0;
  };
  if (ends("ies")) return w.substr(0, w.size() - 3) + "y";
  if (ends("ches") || ends("shes") || ends("xes") || ends("sses") ||
      ends("oes")) {
    return w.substr(0, w.size() - 2);
  }
  if (ends("ss") || ends("us") || ends("is")) return w;
  if (ends("s")) return w.substr(0, w.size() - 1);
  return w;
}

bool StartsWith(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

bool Contains(std::string_view haystack, std::string_view needle) {
  return haystack.find(needle) != std::string_view::npos;
}

std::string Join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

}  // namespace promptalign::text
