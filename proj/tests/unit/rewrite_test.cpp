// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "promptalign/error.hpp"
#include "promptalign/rewrite.hpp"

namespace promptalign::rewrite {
namespace {

TEST(RewriteTest, Edits) {
  const std::string p = "Four dogs. A red ball.";
  EXPECT_EQ(ApplyEdit("identity", p), p);
  EXPECT_EQ(ApplyEdit("clarify-first", p), "Clearly, Four dogs. A red ball.");
  EXPECT_EQ(ApplyEdit("clarify-last", p), "Four dogs. Clearly, A red ball.");
  EXPECT_EQ(ApplyEdit("clarify-all", p), "Clearly, Four dogs. Clearly, A red ball.");
  EXPECT_EQ(ApplyEdit("exact-counts", "Four dogs and 3 cats, exactly two birds."),
            "exactly Four dogs and exactly 3 cats, exactly two birds.");
  EXPECT_EQ(ApplyEdit("quality-tags", p), p + " Highly detailed, sharp focus.");
  EXPECT_EQ(ApplyEdit("quality-tags", "A fox leaping"), "A fox leaping. Highly detailed, sharp focus.");
  EXPECT_THROW(ApplyEdit("delete-everything", p), Error);
  EXPECT_EQ(ToyActions().size(), 6u);
}

TEST(RewriteTest, EditsNeverDropWords) {
  const std::string p = "A cup full of soda water, no scallions. Text \"Hi\" at the top.";
  for (const auto& a : ToyActions()) {
    const auto out = ApplyEdit(a, p);
    for (const char* w : {"cup", "soda", "scallions", "\"Hi\"", "top"}) {
      EXPECT_NE(out.find(w), std::string::npos) << a << " dropped " << w;
    }
  }
}

}  // namespace
}  // namespace promptalign::rewrite
