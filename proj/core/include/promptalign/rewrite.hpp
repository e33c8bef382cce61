// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

// Rewrite edits the toy policy chooses between. Each edit maps a user prompt
// to a reprompt; none removes content from the prompt.

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace promptalign::rewrite {

//   identity       prompt unchanged
//   clarify-first  first sentence restated as explicit
//   clarify-last   last sentence restated as explicit
//   clarify-all    every sentence restated as explicit
//   exact-counts   "exactly" before every number word
//   quality-tags   appends generic quality tags
const std::vector<std::string>& ToyActions();

// Throws Error{kInvalidArgument} for an unknown edit.
std::string ApplyEdit(std::string_view edit, std::string_view prompt);

}  // namespace promptalign::rewrite
