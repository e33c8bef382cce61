// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>

#include "promptalign/curation.hpp"
#include "promptalign/error.hpp"
#include "promptalign/orchestrator.hpp"
#include "promptalign/text_util.hpp"
#include "support/filter_corpus.hpp"
#include "support/keypoint_cases.hpp"
#include "support/stub_server.hpp"

namespace promptalign::curation {
namespace {

using promptalign::testing::CleanCorpus;
using promptalign::testing::DefectCorpus;
using promptalign::testing::Enrichments;

UserPrompt Prompt(const std::string& id, const std::string& text,
                  Language lang = Language::kEn) {
  UserPrompt p;
  p.id = id;
  p.text = text;
  p.language = lang;
  return p;
}

bool Has(const FilterVerdict& v, std::string_view reason) {
  return std::find(v.reasons.begin(), v.reasons.end(), reason) != v.reasons.end();
}

Clock FixedClock() {
  return [] { return *ParseIsoUtc("2026-03-01T12:00:00Z"); };
}

// ---- simulation ----

std::vector<UserPrompt> LongDescriptions() {
  const std::vector<std::string> en = {
      "A weathered fishing boat rests on a pebble beach at low tide, its hull painted a faded "
      "turquoise, while gulls circle above and a lighthouse stands on the distant headland.",
      "An elderly woman in a knitted cardigan waters geraniums on a narrow balcony; behind her, "
      "laundry hangs between apartment windows in the afternoon sun.",
      "Three children build a lopsided snowman in a suburban front yard, one of them wearing "
      "bright red mittens, with a golden retriever bounding through the drifts.",
      "A steaming bowl of ramen sits on a wooden counter, topped with a soft-boiled egg, sliced "
      "pork and nori, beside a pair of lacquered chopsticks.",
      "Rain streaks the window of a late-night diner where a lone trucker reads a paperback "
      "novel next to a half-finished slice of cherry pie.",
      "A vintage red bicycle leans against a brick wall covered in ivy, a wicker basket full of "
      "sunflowers fixed to its handlebars.",
      "Morning mist drifts over a rice terrace in the mountains as a farmer in a conical hat "
      "guides a water buffalo along the muddy path.",
  };
  const std::vector<std::string> zh = {
      "清晨的江南水乡，一位老人撑着乌篷船穿过石拱桥，两岸白墙黛瓦的民居倒映在平静的河面上。",
      "一只橘猫蜷缩在窗台上晒太阳，窗外是盛开的樱花树，微风吹落几片粉色的花瓣。",
      "夜晚的城市街头，霓虹灯招牌闪烁，一位穿着红色外套的女孩撑着透明雨伞走过湿漉漉的路面。",
  };
  std::vector<UserPrompt> out;
  for (std::size_t i = 0; i < en.size(); ++i) out.push_back(Prompt("en-" + std::to_string(i), en[i]));
  for (std::size_t i = 0; i < zh.size(); ++i) {
    out.push_back(Prompt("zh-" + std::to_string(i), zh[i], Language::kZh));
  }
  return out;
}

TEST(SimulateTest, EachOutputShorterThanItsSource) {
  const auto corpus = LongDescriptions();
  ASSERT_EQ(corpus.size(), 10u);
  const auto out = SimulatePrompts(corpus, 10, 3);
  ASSERT_EQ(out.size(), 10u);
  std::set<std::string> sources;
  for (const auto& p : out) {
    const auto src_id = p.extra["source_id"].get<std::string>();
    sources.insert(src_id);
    const auto& src = *std::find_if(corpus.begin(), corpus.end(),
                                    [&](const UserPrompt& c) { return c.id == src_id; });
    EXPECT_LT(text::CharLength(p.text), text::CharLength(src.text)) << p.text;
    EXPECT_LE(text::CharLength(p.text), SimulateOptions{}.max_chars);
    EXPECT_FALSE(p.text.empty());
    EXPECT_EQ(p.language, src.language);
  }
  EXPECT_EQ(sources.size(), 10u);
}

TEST(SimulateTest, OversamplingHonoursCountAndLanguage) {
  const auto corpus = LongDescriptions();
  const auto out = SimulatePrompts(corpus, 37, 9, {40});
  ASSERT_EQ(out.size(), 37u);
  for (const auto& p : out) {
    EXPECT_LE(text::CharLength(p.text), 40u);
    const bool zh_source = p.extra["source_id"].get<std::string>().rfind("zh-", 0) == 0;
    EXPECT_EQ(p.language == Language::kZh, zh_source);
    EXPECT_EQ(text::ContainsCjk(p.text), zh_source) << p.text;
  }
}

TEST(SimulateTest, DeterministicPerSeed) {
  const auto corpus = LongDescriptions();
  auto dump = [](const std::vector<UserPrompt>& v) {
    std::string s;
    for (const auto& p : v) s += ToJson(p).dump() + "\n";
    return s;
  };
  EXPECT_EQ(dump(SimulatePrompts(corpus, 25, 4)), dump(SimulatePrompts(corpus, 25, 4)));
  EXPECT_NE(dump(SimulatePrompts(corpus, 25, 4)), dump(SimulatePrompts(corpus, 25, 5)));
}

TEST(SimulateTest, EmptyCorpusRejected) {
  try {
    SimulatePrompts({}, 3, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyCorpus);
  }
}

TEST(ShortenTest, AlwaysStrictlyShorter) {
  EXPECT_EQ(Shorten("A red fox. It jumps over the fence.", 120), "A red fox");
  EXPECT_EQ(Shorten("A red fox", 120), "A red");
  EXPECT_EQ(Shorten("A red fox, a brown dog, and a cat on a hill.", 12), "A red fox");
}

// ---- teacher ----

std::string WellFormed(std::size_t k) {
  std::string s = "<cot>The user wants four dogs; keep the count explicit.</cot>\n";
  for (std::size_t i = 0; i < k; ++i) {
    s += "<candidate>Exactly four dogs, version " + std::to_string(i) + ".</candidate>\n";
  }
  return s;
}

TEST(TeacherParseTest, WellFormedAndMalformed) {
  const auto out = ParseTeacherOutput(WellFormed(3), 3);
  EXPECT_EQ(out.candidates.size(), 3u);
  EXPECT_NE(out.cot.find("four dogs"), std::string::npos);
  auto code = [](const std::string& reply, std::size_t k) {
    try {
      ParseTeacherOutput(reply, k);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInvalidArgument;
  };
  EXPECT_EQ(code("<candidate>a</candidate><candidate>b</candidate>", 2),
            ErrorCode::kMalformedTeacherOutput);
  EXPECT_EQ(code(WellFormed(2), 3), ErrorCode::kMalformedTeacherOutput);
  EXPECT_EQ(code("<cot>x</cot><candidate>a", 1), ErrorCode::kMalformedTeacherOutput);
}

TEST(TeacherRequestTest, CarriesStructureAndAnalysisDirectives) {
  const auto body = TeacherRequest(Prompt("p", "Four dogs."), 3, std::nullopt);
  EXPECT_NE(body.find("## Sentence structure"), std::string::npos);
  EXPECT_NE(body.find("## Analysis dimensions"), std::string::npos);
  EXPECT_NE(body.find("Four dogs."), std::string::npos);
  EXPECT_EQ(body.find("{{"), std::string::npos);
}

struct TeacherStub {
  promptalign::testing::StubServer server;
  std::atomic<int> calls{0};
  std::string last_body;
  std::mutex mu;

  explicit TeacherStub(std::function<std::string(int)> reply) {
    server.server().Post("/v1/chat/completions",
                         [this, reply](const httplib::Request& req, httplib::Response& res) {
                           const int n = calls++;
                           {
                             std::lock_guard lock(mu);
                             last_body = req.body;
                           }
                           Json out{{"choices",
                                     {{{"message", {{"role", "assistant"}, {"content", reply(n)}}}}}}};
                           res.set_content(out.dump(), "application/json");
                         });
    server.Start();
  }

  endpoint::EndpointConfig Config() const {
    endpoint::EndpointConfig cfg;
    cfg.base_url = server.url();
    cfg.model = "teacher";
    cfg.backoff_initial_ms = 1;
    return cfg;
  }
};

TEST(GenerateTest, StubTeacherWellFormed) {
  TeacherStub stub([](int) { return WellFormed(3); });
  GenerateOptions opts;
  opts.teacher = stub.Config();
  opts.clock = FixedClock();
  const auto set = GenerateCandidates(Prompt("p1", "Four dogs."), opts, 1);
  EXPECT_EQ(set.candidates.size(), 3u);
  EXPECT_EQ(set.stage, Stage::kGenerated);
  EXPECT_FALSE(Check(set).has_value());
  const auto body = Json::parse(stub.last_body);
  const auto content = body["messages"][0]["content"].get<std::string>();
  EXPECT_NE(content.find("## Sentence structure"), std::string::npos);
  EXPECT_NE(content.find("## Analysis dimensions"), std::string::npos);
  ASSERT_EQ(set.provenance.size(), 2u);
  EXPECT_EQ(set.provenance[1].stage, "generated");
  EXPECT_EQ(set.provenance[1].at, "2026-03-01T12:00:00Z");
}

TEST(GenerateTest, MissingCotSurfacesAfterRetries) {
  TeacherStub stub([](int) { return std::string("<candidate>a</candidate><candidate>b</candidate><candidate>c</candidate>"); });
  GenerateOptions opts;
  opts.teacher = stub.Config();
  opts.malformed_retries = 2;
  try {
    GenerateCandidates(Prompt("p1", "Four dogs."), opts, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformedTeacherOutput);
  }
  EXPECT_EQ(stub.calls.load(), 3);
}

TEST(GenerateTest, MalformedThenGoodIsRetried) {
  TeacherStub stub([](int n) { return n == 0 ? std::string("nothing useful") : WellFormed(3); });
  GenerateOptions opts;
  opts.teacher = stub.Config();
  EXPECT_EQ(GenerateCandidates(Prompt("p1", "Four dogs."), opts, 1).candidates.size(), 3u);
  EXPECT_EQ(stub.calls.load(), 2);
}

TEST(GenerateTest, TemplateTeacherIsDeterministicAndFilterClean) {
  GenerateOptions opts;
  opts.clock = FixedClock();
  const auto prompts = orchestrator::SyntheticPrompts(30, 2);
  const auto a = GenerateAll(prompts, opts, 5);
  const auto b = GenerateAll(prompts, opts, 5);
  ASSERT_EQ(a.size(), 30u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(ToJson(a[i]).dump(), ToJson(b[i]).dump());
    EXPECT_EQ(a[i].candidates.size(), kDefaultCandidates);
    const auto r = AutoFilter(a[i], FilterRules{}, FixedClock());
    ASSERT_TRUE(r.survivor.has_value());
    EXPECT_EQ(r.survivor->candidates.size(), kDefaultCandidates);
  }
}

TEST(CandidateSetTest, JsonRoundTripAndChecks) {
  CandidateSet s;
  s.user_prompt = Prompt("p", "Two cats.");
  s.cot = "c";
  s.candidates = {"a", "b"};
  s.stage = Stage::kFiltered;
  s.provenance = {{"generated", "2026-01-01T00:00:00Z"}};
  CandidateSet back;
  FromJson(ToJson(s), back);
  EXPECT_EQ(back, s);
  s.image_refs = {"only-one"};
  EXPECT_TRUE(Check(s).has_value());
  s.image_refs.clear();
  s.candidates = {"a"};
  EXPECT_TRUE(Check(s).has_value());
  Json bad = ToJson(back);
  bad["stage"] = "shipped";
  EXPECT_THROW(FromJson(bad, back), SchemaError);
}

// ---- filter rules ----

TEST(FilterTest, VerbatimCandidateKept) {
  for (const auto& c : promptalign::testing::KeypointCases()) {
    const auto v = CheckCandidate(Prompt("p", c.prompt), c.prompt, FilterRules{});
    EXPECT_TRUE(v.keep) << c.prompt;
    EXPECT_TRUE(v.reasons.empty());
  }
}

TEST(FilterTest, DegenerateRepeatedCharacters) {
  const auto v = CheckCandidate(Prompt("p", "A dog."), std::string(10000, 'a'), FilterRules{});
  EXPECT_FALSE(v.keep);
  EXPECT_TRUE(Has(v, kIncoherence));
  EXPECT_TRUE(Has(v, kLengthBounds));
}

TEST(FilterTest, DroppingOnlyNamedEntityIsInformationLoss) {
  const auto p = Prompt("p", "A bronze statue of Napoleon in a park.");
  EXPECT_EQ(NamedEntities(p.text, FilterRules{}), std::vector<std::string>{"Napoleon"});
  const auto v = CheckCandidate(p, "A bronze statue of a general in a park.", FilterRules{});
  EXPECT_FALSE(v.keep);
  EXPECT_EQ(v.reasons, std::vector<std::string>{std::string(kInformationLoss)});
}

TEST(FilterTest, EntityHeuristics) {
  FilterRules rules;
  EXPECT_EQ(NamedEntities("The Great Wall of China / Marie Curie.", rules),
            (std::vector<std::string>{"Great Wall of China", "Marie Curie"}));
  EXPECT_EQ(NamedEntities("Poster with text \"Game of Thrones\" at the bottom.", rules),
            std::vector<std::string>{"Game of Thrones"});
  EXPECT_TRUE(NamedEntities("Man (buzz cut, blue shirt) and woman.", rules).empty());
  EXPECT_TRUE(NamedEntities("Clearly, four dogs.", rules).empty());
  rules.entity_lexicon = {"mona lisa"};
  EXPECT_EQ(NamedEntities("a copy of the mona lisa", rules), std::vector<std::string>{"mona lisa"});
}

TEST(FilterTest, RulesJsonRejectsUnknownKeys) {
  FilterRules r;
  r.max_chars = 300;
  EXPECT_EQ(FilterRulesFromJson(ToJson(r)).max_chars, 300u);
  EXPECT_THROW(FilterRulesFromJson(Json{{"max_len", 3}}), Error);
}

TEST(FilterCorpusTest, EveryInjectedDefectCaught) {
  const auto corpus = DefectCorpus();
  std::map<std::string, std::size_t> total, caught;
  for (const auto& p : corpus) {
    const auto v = CheckCandidate(p.prompt, p.candidate, FilterRules{});
    ++total[p.defect];
    if (Has(v, p.defect)) {
      ++caught[p.defect];
    } else {
      ADD_FAILURE() << p.defect << " missed: [" << p.prompt.text << "] -> [" << p.candidate.substr(0, 80) << "]";
    }
    EXPECT_FALSE(v.keep);
  }
  for (const auto& label : {kSemanticDeviation, kInformationLoss, kIncoherence, kLengthBounds}) {
    EXPECT_EQ(total[std::string(label)], 50u) << label;
    EXPECT_EQ(caught[std::string(label)], 50u) << label;
  }
}

TEST(FilterCorpusTest, CleanPairsAllKept) {
  const auto corpus = CleanCorpus();
  ASSERT_EQ(corpus.size(), 200u);
  for (const auto& p : corpus) {
    const auto v = CheckCandidate(p.prompt, p.candidate, FilterRules{});
    EXPECT_TRUE(v.keep) << p.prompt.text << " -> " << p.candidate << " : "
                        << (v.reasons.empty() ? "" : v.reasons[0]);
  }
}

TEST(AutoFilterTest, MonotoneAndDropsSmallSets) {
  CandidateSet s;
  s.user_prompt = Prompt("p", "A bronze statue of Napoleon in a park.");
  s.cot = "c";
  s.candidates = {"A bronze statue of Napoleon in a park, at dusk.",
                  "A bronze statue of a general in a park.",
                  "Napoleon statue, bronze, in a leafy park."};
  s.provenance = {{"simulated", "t0"}, {"generated", "t1"}};
  const auto r = AutoFilter(s, FilterRules{}, FixedClock());
  ASSERT_EQ(r.verdicts.size(), 3u);
  EXPECT_FALSE(r.verdicts[1].keep);
  ASSERT_TRUE(r.survivor.has_value());
  EXPECT_EQ(r.survivor->candidates.size(), 2u);
  EXPECT_EQ(r.survivor->stage, Stage::kFiltered);
  EXPECT_EQ(r.survivor->provenance.back().stage, "filtered");
  for (const auto& c : r.survivor->candidates) {
    EXPECT_NE(std::find(s.candidates.begin(), s.candidates.end(), c), s.candidates.end());
  }
  s.candidates[2] = "";
  EXPECT_FALSE(AutoFilter(s, FilterRules{}).survivor.has_value());
  s.stage = Stage::kFiltered;
  EXPECT_THROW(AutoFilter(s, FilterRules{}), Error);
}

TEST(AutoFilterTest, Deterministic) {
  const auto corpus = DefectCorpus();
  for (std::size_t i = 0; i < corpus.size(); i += 7) {
    const auto a = CheckCandidate(corpus[i].prompt, corpus[i].candidate, FilterRules{});
    const auto b = CheckCandidate(corpus[i].prompt, corpus[i].candidate, FilterRules{});
    EXPECT_EQ(ToJson(a).dump(), ToJson(b).dump());
  }
}

TEST(ReviewTest, ParsesLabelsFromReviewer) {
  TeacherStub stub([](int n) {
    return n == 0 ? std::string("{\"reasons\": []}")
                  : std::string("Verdict: {\"reasons\": [\"information_loss\"]}");
  });
  const auto p = Prompt("p", "A statue of Napoleon.");
  EXPECT_TRUE(ReviewCandidate(p, "A statue of Napoleon.", stub.Config(), std::nullopt).keep);
  const auto v = ReviewCandidate(p, "A statue.", stub.Config(), std::nullopt);
  EXPECT_FALSE(v.keep);
  EXPECT_EQ(v.reasons, std::vector<std::string>{std::string(kInformationLoss)});
}

}  // namespace
}  // namespace promptalign::curation
