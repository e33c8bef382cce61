// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>

#include "promptalign/error.hpp"
#include "promptalign/orchestrator.hpp"
#include "promptalign/rewrite.hpp"
#include "promptalign/text_util.hpp"

namespace promptalign::orchestrator {

namespace {

using Pool = std::vector<const char*>;

const char* Pick(Rng& rng, const Pool& pool) {
  return pool[static_cast<std::size_t>(rng.UniformInt(0, static_cast<std::int64_t>(pool.size()) - 1))];
}

std::pair<const char*, const char*> PickTwo(Rng& rng, const Pool& pool) {
  const char* a = Pick(rng, pool);
  const char* b = a;
  while (std::string(b) == a) b = Pick(rng, pool);
  return {a, b};
}

std::string Cap(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

const Pool kNumbers = {"two", "three", "four", "five", "six", "seven", "eight"};
const Pool kAnimals = {"cat", "dog", "bird", "rabbit", "fox", "horse", "owl", "deer"};
const Pool kPeople = {"man", "woman", "girl", "boy", "dancer", "chef", "knight", "pilot"};
const Pool kObjects = {"vase", "lamp", "clock", "teapot", "candle", "mug", "book", "kite"};
const Pool kColors = {"red", "blue", "yellow", "green", "purple", "white", "black", "orange"};
const Pool kSizes = {"large", "small", "tiny", "huge", "giant"};
const Pool kMaterials = {"ice", "glass", "marble", "wood", "bronze", "clay", "jade"};
const Pool kExpressions = {"happy", "sad", "angry", "surprised", "calm", "proud", "grumpy"};
const Pool kStyles = {"watercolor", "pixel art", "oil painting", "chinese ink wash",
                      "pencil sketch", "pop art"};
const Pool kPositions = {"top-left", "top-right", "bottom-left", "bottom-right"};

using Maker = std::function<std::string(Rng&)>;

// One sentence template per keypoint, in taxonomy order.
const std::map<std::string, Maker>& Makers() {
  static const std::map<std::string, Maker> m = {
      {"negation",
       [](Rng& r) {
         return std::string("A ") + Pick(r, kObjects) + " on a table, no " + Pick(r, kAnimals) +
                "s.";
       }},
      {"attribute-consistency",
       [](Rng& r) {
         return Cap(Pick(r, kNumbers)) + " " + Pick(r, {"soldiers", "dancers", "students", "children"}) +
                " all wearing " + Pick(r, kColors) + " " + Pick(r, {"shirts", "hats", "coats"}) + ".";
       }},
      {"pronoun-resolution",
       [](Rng& r) {
         return std::string("The ") + Pick(r, kSizes) + " " +
                Pick(r, {"ball", "statue", "box", "robot"}) + " broke the " +
                Pick(r, {"table", "window", "chair", "door"}) + " because it was made of " +
                Pick(r, {"metal", "stone", "steel", "iron"}) + ".";
       }},
      {"counting",
       [](Rng& r) {
         return std::string("A picture with ") + Pick(r, kNumbers) + " " + Pick(r, kAnimals) + "s.";
       }},
      {"size",
       [](Rng& r) {
         return Cap(Pick(r, kNumbers)) + " " + Pick(r, kSizes) + " " +
                Pick(r, {"spheres", "cubes", "balloons"}) + ".";
       }},
      {"material",
       [](Rng& r) {
         return std::string("A ") + Pick(r, kMaterials) + " " + Pick(r, {"sculpture", "statue"}) +
                " of a " + Pick(r, kAnimals) + ".";
       }},
      {"expression",
       [](Rng& r) {
         return std::string("A ") + Pick(r, kPeople) + " with a " + Pick(r, kExpressions) +
                " expression.";
       }},
      {"artistic-style",
       [](Rng& r) {
         return Cap(Pick(r, kNumbers)) + " " + Pick(r, kAnimals) + "s in " + Pick(r, kStyles) + ".";
       }},
      {"full-body-action",
       [](Rng& r) {
         return std::string("A ") + Pick(r, kPeople) + " " +
                Pick(r, {"dancing", "jumping", "climbing", "kneeling", "somersaulting"}) +
                " in a park.";
       }},
      {"hand-action",
       [](Rng& r) {
         return std::string("A hand ") + Pick(r, {"holding", "grabbing", "peeling"}) + " a " +
                Pick(r, {"cup", "pencil", "apple", "key", "brush"}) + ".";
       }},
      {"animal-action",
       [](Rng& r) {
         return std::string("A ") + Pick(r, kAnimals) + " happily " +
                Pick(r, {"running", "jumping", "swimming", "leaping"}) + ".";
       }},
      {"contact-interaction",
       [](Rng& r) {
         return std::string("A ") + Pick(r, kPeople) + " " +
                Pick(r, {"kicking", "pushing", "lifting", "pulling"}) + " a " +
                Pick(r, {"ball", "box", "bicycle", "ladder"}) + ".";
       }},
      {"interaction-wo-contact",
       [](Rng& r) {
         return std::string("A ") + Pick(r, kPeople) + " " +
                Pick(r, {"looking at", "watching", "waving at", "pointing at"}) + " a " +
                Pick(r, kAnimals) + ".";
       }},
      {"state",
       [](Rng& r) {
         return Cap(Pick(r, {"leaves falling", "clouds drifting", "petals floating",
                             "candles glowing", "snow falling"})) +
                " slowly.";
       }},
      {"comparative-relation",
       [](Rng& r) {
         auto [c1, c2] = PickTwo(r, kColors);
         const char* who = Pick(r, {"woman", "man", "girl", "boy"});
         return Cap(who) + " in " + c1 + " " + Pick(r, {"taller", "shorter", "older"}) +
                " than " + who + " in " + c2 + ".";
       }},
      {"compositional-relation",
       [](Rng& r) {
         return std::string("A ") + Pick(r, kAnimals) + " made of " +
                Pick(r, {"orange slices", "apples", "books", "flowers", "leaves"}) + ".";
       }},
      {"containment-relation",
       [](Rng& r) {
         return std::string("A ") + Pick(r, {"cup", "bottle", "basket", "box"}) + " full of " +
                Pick(r, {"soda water", "apples", "flowers", "candles"}) + ".";
       }},
      {"similarity-relation",
       [](Rng& r) {
         return std::string("A ") + Pick(r, {"lake", "cloud", "island"}) + " shaped like a " +
                Pick(r, {"guitar", "key", "bicycle", "teapot"}) + ".";
       }},
      {"cross-entity-binding",
       [](Rng& r) {
         auto [c1, c2] = PickTwo(r, kColors);
         return std::string("Man in ") + c1 + " shirt and woman in " + c2 + " dress.";
       }},
      {"entity-layout",
       [](Rng& r) {
         return std::string("A ") + Pick(r, {"car", "race car", "bicycle"}) +
                " on a road, with a " + Pick(r, {"mini-map", "clock", "sign"}) + " in the " +
                Pick(r, kPositions) + " corner.";
       }},
      {"knowledge-application",
       [](Rng& r) {
         return std::string("The ") +
                Pick(r, {"Eiffel Tower", "Great Wall of China", "Taj Mahal", "Colosseum",
                         "Golden Gate Bridge"}) +
                " at sunset.";
       }},
      {"counterfactual",
       [](Rng& r) {
         return std::string("A ") + Pick(r, kPeople) + " " +
                Pick(r, {"suspended above the clouds", "walking on water", "defying gravity"}) +
                ".";
       }},
      {"text-rendering",
       [](Rng& r) {
         return std::string("A poster with text \"") +
                Pick(r, {"Hello World", "Open Late", "Fresh Coffee", "Good Luck"}) + "\".";
       }},
      {"text-layout",
       [](Rng& r) {
         return std::string("A sign with text \"") +
                Pick(r, {"Keep Out", "Welcome Home", "Sale Today"}) + "\" at the " +
                Pick(r, {"top", "bottom"}) + ".";
       }},
  };
  return m;
}

bool Usable(const UserPrompt& p) {
  const auto faithful = evaluator::MockT2i(p.text, 1, {0.0});
  if (evaluator::Evaluate(faithful, p).reward != 1.0) return false;
  const auto explicit_text = rewrite::ApplyEdit("clarify-all", p.text);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    if (evaluator::Evaluate(evaluator::MockT2i(explicit_text, seed, {1.0}), p).reward != 1.0) {
      return false;
    }
  }
  return true;
}

}  // namespace

std::vector<UserPrompt> SyntheticPrompts(std::size_t count, std::uint64_t seed) {
  const auto reg = taxonomy::Registry();
  const auto& makers = Makers();
  Rng rng(MixSeeds({seed, 0x5917ULL}));
  std::vector<UserPrompt> out;
  std::size_t rejected = 0;
  while (out.size() < count) {
    const auto k = static_cast<std::size_t>(rng.UniformInt(1, 2));
    std::vector<std::string> kps;
    while (kps.size() < k) {
      const auto& id = reg[static_cast<std::size_t>(rng.UniformInt(0, static_cast<std::int64_t>(reg.size()) - 1))].id;
      if (std::find(kps.begin(), kps.end(), id) == kps.end()) kps.push_back(id);
    }
    UserPrompt p;
    p.id = "syn-" + std::to_string(out.size());
    p.theme = static_cast<Theme>(rng.UniformInt(0, 4));
    std::vector<std::string> sentences;
    for (const auto& id : kps) sentences.push_back(makers.at(id)(rng));
    p.text = text::Join(sentences, " ");
    p.keypoint_ids = kps;
    if (Usable(p)) {
      out.push_back(std::move(p));
    } else if (++rejected > 100 * (count + 1)) {
      throw Error(ErrorCode::kInvalidArgument, "synthetic prompt templates keep failing");
    }
  }
  return out;
}

}  // namespace promptalign::orchestrator
