// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace promptalign::text {

// Number of Unicode code points in a UTF-8 string. Prompt lengths are
// measured in characters, not bytes or tokens.
std::size_t CharLength(std::string_view utf8);

// Splits into code points, each returned as its UTF-8 byte sequence.
std::vector<std::string> CodePoints(std::string_view utf8);

// Decodes the code point starting at `pos`; advances `pos`.
char32_t DecodeAt(std::string_view utf8, std::size_t& pos);

bool IsCjk(char32_t cp);
bool ContainsCjk(std::string_view utf8);

// ASCII-only lowercase; multi-byte sequences pass through unchanged.
std::string ToLowerAscii(std::string_view s);

std::string Trim(std::string_view s);

// Truncates to at most `max_chars` code points, backing off to the last
// ASCII space when one exists in the kept prefix.
std::string TruncateChars(std::string_view utf8, std::size_t max_chars);

// Word tokens: runs of ASCII letters/digits/'-'/'#', lowercased. Every CJK
// code point is its own token.
std::vector<std::string> Tokenize(std::string_view utf8);

// English plural to singular for the closed vocabulary used here.
std::string Singularize(std::string_view word);

bool StartsWith(std::string_view s, std::string_view prefix);
bool Contains(std::string_view haystack, std::string_view needle);

std::string Join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace promptalign::text
