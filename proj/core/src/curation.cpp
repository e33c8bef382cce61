// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#include "promptalign/curation.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <ctime>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

#include "promptalign/assets.hpp"
#include "promptalign/error.hpp"
#include "promptalign/log.hpp"
#include "promptalign/rewrite.hpp"
#include "promptalign/rng.hpp"
#include "promptalign/scene_parser.hpp"
#include "promptalign/text_util.hpp"
#include "internal.hpp"

namespace promptalign::curation {

namespace {

std::chrono::system_clock::time_point Now(const Clock& clock) {
  return clock ? clock() : std::chrono::system_clock::now();
}

bool IsTerminator(const std::string& cp) {
  return cp == "." || cp == "!" || cp == "?" || cp == "\xE3\x80\x82" /* 。 */ ||
         cp == "\xEF\xBC\x81" /* ！ */ || cp == "\xEF\xBC\x9F" /* ？ */;
}

bool IsClauseBreak(const std::string& cp) {
  return cp == "," || cp == ";" || cp == ":" || cp == "\xEF\xBC\x8C" /* ， */ ||
         cp == "\xEF\xBC\x9B" /* ； */ || cp == "\xE3\x80\x81" /* 、 */;
}

std::string StripTrailing(std::string s) {
  while (!s.empty()) {
    auto cps = text::CodePoints(s);
    if (cps.empty()) break;
    const auto& last = cps.back();
    if (IsTerminator(last) || IsClauseBreak(last) || last == " ") {
      s.resize(s.size() - last.size());
    } else {
      break;
    }
  }
  return s;
}

}  // namespace

std::string IsoUtc(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::optional<std::chrono::system_clock::time_point> ParseIsoUtc(std::string_view s) {
  std::tm tm{};
  std::istringstream is{std::string(s)};
  is >> std::get_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  if (is.fail()) return std::nullopt;
  return std::chrono::system_clock::from_time_t(timegm(&tm));
}

// ---- simulation ----

std::string Shorten(std::string_view description, std::size_t max_chars) {
  const auto cps = text::CodePoints(text::Trim(description));
  // First sentence.
  std::string first;
  bool in_quote = false;
  for (const auto& cp : cps) {
    if (cp == "\"") in_quote = !in_quote;
    first += cp;
    if (!in_quote && IsTerminator(cp)) break;
  }
  first = StripTrailing(text::Trim(first));
  if (text::CharLength(first) > max_chars) {
    // Leading clauses that fit.
    std::string kept;
    std::string clause;
    for (const auto& cp : text::CodePoints(first)) {
      clause += cp;
      if (IsClauseBreak(cp)) {
        if (!kept.empty() && text::CharLength(kept + clause) > max_chars) break;
        kept += clause;
        clause.clear();
      }
    }
    if (kept.empty()) kept = clause;
    first = StripTrailing(text::TruncateChars(text::Trim(kept), max_chars));
  }
  const auto source_len = text::CharLength(text::Trim(description));
  if (text::CharLength(first) >= source_len) {
    // Already a one-clause query: drop its last word (or character for CJK).
    const auto space = first.find_last_of(' ');
    if (space != std::string::npos) {
      first = StripTrailing(first.substr(0, space));
    } else if (text::ContainsCjk(first)) {
      auto parts = text::CodePoints(first);
      if (parts.size() > 1) {
        parts.pop_back();
        first = StripTrailing(text::Join(parts, ""));
      }
    }
  }
  return first;
}

std::vector<UserPrompt> SimulatePrompts(std::span<const UserPrompt> corpus, std::size_t count,
                                        std::uint64_t seed, const SimulateOptions& options) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "simulation corpus is empty");
  Rng rng(MixSeeds({seed, 0x51aULL}));
  std::vector<std::size_t> picks;
  if (count <= corpus.size()) {
    std::vector<std::size_t> order(corpus.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1],
                order[static_cast<std::size_t>(rng.UniformInt(0, static_cast<std::int64_t>(i) - 1))]);
    }
    picks.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count));
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      picks.push_back(static_cast<std::size_t>(
          rng.UniformInt(0, static_cast<std::int64_t>(corpus.size()) - 1)));
    }
  }
  std::vector<UserPrompt> out;
  out.reserve(count);
  for (std::size_t i = 0; i < picks.size(); ++i) {
    const auto& src = corpus[picks[i]];
    UserPrompt p;
    p.id = "sim-" + std::to_string(i) + "-" + src.id;
    p.text = Shorten(src.text, options.max_chars);
    if (p.text.empty()) p.text = text::TruncateChars(src.text, options.max_chars);
    p.language = src.language;
    p.theme = src.theme;
    p.subtheme = src.subtheme;
    p.extra = Json{{"source_id", src.id}};
    out.push_back(std::move(p));
  }
  return out;
}

// ---- candidate sets ----

std::string_view ToString(Stage s) {
  switch (s) {
    case Stage::kGenerated: return "generated";
    case Stage::kFiltered: return "filtered";
    case Stage::kAwaitingSelection: return "awaiting_selection";
    case Stage::kFinalized: return "finalized";
  }
  return "generated";
}

std::optional<Stage> ParseStage(std::string_view s) {
  for (auto st : {Stage::kGenerated, Stage::kFiltered, Stage::kAwaitingSelection,
                  Stage::kFinalized}) {
    if (ToString(st) == s) return st;
  }
  return std::nullopt;
}

Json ToJson(const CandidateSet& s) {
  Json prov = Json::array();
  for (const auto& st : s.provenance) prov.push_back({{"stage", st.stage}, {"at", st.at}});
  return Json{{"user_prompt", promptalign::ToJson(s.user_prompt)},
              {"cot", s.cot},
              {"candidates", s.candidates},
              {"image_refs", s.image_refs},
              {"stage", ToString(s.stage)},
              {"provenance", prov}};
}

void FromJson(const Json& j, CandidateSet& out) {
  if (!j.is_object()) throw SchemaError("<record>", "must be an object");
  CandidateSet s;
  if (!j.contains("user_prompt")) throw SchemaError("user_prompt", "missing");
  try {
    promptalign::FromJson(j["user_prompt"], s.user_prompt);
  } catch (const SchemaError& e) {
    throw SchemaError("user_prompt." + e.problem().field, e.problem().reason);
  }
  auto str = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_string()) throw SchemaError(key, "must be a string");
    return j[key].get<std::string>();
  };
  auto list = [&](const char* key) {
    std::vector<std::string> v;
    if (!j.contains(key)) return v;
    if (!j[key].is_array()) throw SchemaError(key, "must be an array of strings");
    for (const auto& e : j[key]) {
      if (!e.is_string()) throw SchemaError(key, "must be an array of strings");
      v.push_back(e.get<std::string>());
    }
    return v;
  };
  s.cot = str("cot");
  s.candidates = list("candidates");
  s.image_refs = list("image_refs");
  const auto stage = ParseStage(str("stage"));
  if (!stage) throw SchemaError("stage", "unknown stage");
  s.stage = *stage;
  if (j.contains("provenance")) {
    if (!j["provenance"].is_array()) throw SchemaError("provenance", "must be an array");
    for (const auto& p : j["provenance"]) {
      if (!p.is_object() || !p.contains("stage") || !p.contains("at") || !p["stage"].is_string() ||
          !p["at"].is_string()) {
        throw SchemaError("provenance", "entries need string stage and at");
      }
      s.provenance.push_back({p["stage"].get<std::string>(), p["at"].get<std::string>()});
    }
  }
  if (auto problem = Check(s)) throw SchemaError(problem->field, problem->reason);
  out = std::move(s);
}

std::optional<FieldProblem> Check(const CandidateSet& s) {
  if (auto p = promptalign::Check(s.user_prompt)) {
    return FieldProblem{"user_prompt." + p->field, p->reason};
  }
  if (s.candidates.size() < 2) return FieldProblem{"candidates", "need at least 2"};
  if (!s.image_refs.empty() && s.image_refs.size() != s.candidates.size()) {
    return FieldProblem{"image_refs", "must be empty or one per candidate"};
  }
  return std::nullopt;
}

// ---- teacher generation ----

TeacherOutput ParseTeacherOutput(std::string_view reply, std::size_t k) {
  auto fail = [](const std::string& why) {
    throw Error(ErrorCode::kMalformedTeacherOutput, why);
  };
  auto block = [&](std::string_view tag, std::size_t from, std::size_t& end_pos)
      -> std::optional<std::string> {
    const std::string open = "<" + std::string(tag) + ">";
    const std::string close = "</" + std::string(tag) + ">";
    const auto b = reply.find(open, from);
    if (b == std::string_view::npos) return std::nullopt;
    const auto e = reply.find(close, b);
    if (e == std::string_view::npos) fail("unterminated <" + std::string(tag) + "> block");
    end_pos = e + close.size();
    return text::Trim(reply.substr(b + open.size(), e - b - open.size()));
  };
  TeacherOutput out;
  std::size_t pos = 0;
  auto cot = block("cot", 0, pos);
  if (!cot || cot->empty()) fail("missing <cot> block");
  out.cot = *cot;
  std::size_t from = 0;
  while (auto c = block("candidate", from, from)) {
    if (c->empty()) fail("empty <candidate> block");
    out.candidates.push_back(*c);
  }
  if (out.candidates.size() != k) {
    fail("expected " + std::to_string(k) + " candidates, got " +
         std::to_string(out.candidates.size()));
  }
  return out;
}

std::string TeacherRequest(const UserPrompt& prompt, std::size_t k,
                           const std::optional<std::filesystem::path>& template_path) {
  const auto tmpl = assets::Load("teacher_rewrite.md", template_path);
  return assets::Render(tmpl, {{"user_prompt", prompt.text}, {"k", std::to_string(k)}});
}

std::string TemplateTeacherReply(const UserPrompt& prompt, std::size_t k, std::uint64_t seed) {
  static const std::vector<std::string> kEdits = {"clarify-all", "exact-counts", "quality-tags",
                                                  "clarify-first", "identity"};
  static const std::vector<std::string> kEnEnrich = {
      "Soft morning light, shallow depth of field.", "Balanced composition, crisp detail.",
      "Warm evening light, gentle shadows.", "Eye-level view, natural colours.",
      "Clean background, even studio lighting."};
  static const std::vector<std::string> kZhEnrich = {"光线柔和，细节清晰。", "构图均衡，色彩自然。",
                                                     "暖色调，阴影柔和。"};
  const auto parsed = grammar::ParsePrompt(prompt.text);
  std::ostringstream os;
  os << "<cot>\n";
  os << "The request asks for: " << prompt.text << "\n";
  if (parsed.facts.empty()) {
    os << "No hard constraints beyond the subject; enrich scene and style only.\n";
  } else {
    os << "Hard requirements to keep and state plainly:\n";
    for (const auto& f : parsed.facts) os << "- " << f.key << "\n";
  }
  os << "Each rewrite keeps every detail above and adds lighting and composition.\n";
  os << "</cot>\n";
  Rng rng(MixSeeds({seed, Fnv1a(prompt.id)}));
  const bool zh = prompt.language == Language::kZh || text::ContainsCjk(prompt.text);
  const auto& enrich = zh ? kZhEnrich : kEnEnrich;
  const auto offset = static_cast<std::size_t>(rng.UniformInt(0, static_cast<std::int64_t>(enrich.size()) - 1));
  for (std::size_t i = 0; i < k; ++i) {
    std::string body = rewrite::ApplyEdit(kEdits[i % kEdits.size()], prompt.text);
    body = text::Trim(body);
    if (!zh && !body.empty() && body.back() != '.' && body.back() != '!' && body.back() != '?') {
      body += ".";
    }
    body += (zh ? "" : " ") + enrich[(offset + i) % enrich.size()];
    os << "<candidate>" << body << "</candidate>\n";
  }
  return os.str();
}

CandidateSet GenerateCandidates(const UserPrompt& prompt, const GenerateOptions& options,
                                std::uint64_t seed) {
  if (options.k < 2) throw Error(ErrorCode::kInvalidArgument, "k must be at least 2");
  TeacherOutput parsed;
  if (!options.teacher) {
    parsed = ParseTeacherOutput(TemplateTeacherReply(prompt, options.k, seed), options.k);
  } else {
    endpoint::ChatRequest req;
    req.messages.push_back({"user", TeacherRequest(prompt, options.k, options.template_path)});
    req.seed = MixSeeds({seed, Fnv1a(prompt.id)});
    std::string last;
    bool ok = false;
    for (int attempt = 0; attempt <= options.malformed_retries && !ok; ++attempt) {
      const auto res = endpoint::ChatComplete(req, *options.teacher);
      try {
        parsed = ParseTeacherOutput(res.text, options.k);
        ok = true;
      } catch (const Error& e) {
        last = e.what();
        log::Logger()->warn("teacher reply for {} malformed: {}", prompt.id, last);
      }
    }
    if (!ok) throw Error(ErrorCode::kMalformedTeacherOutput, prompt.id + ": " + last);
  }
  CandidateSet set;
  set.user_prompt = prompt;
  set.cot = parsed.cot;
  set.candidates = parsed.candidates;
  set.stage = Stage::kGenerated;
  const auto now = IsoUtc(Now(options.clock));
  std::string simulated_at = now;
  if (prompt.extra.contains("simulated_at") && prompt.extra["simulated_at"].is_string()) {
    simulated_at = prompt.extra["simulated_at"].get<std::string>();
  }
  set.provenance = {{"simulated", simulated_at}, {"generated", now}};
  return set;
}

std::vector<CandidateSet> GenerateAll(std::span<const UserPrompt> prompts,
                                      const GenerateOptions& options, std::uint64_t seed) {
  std::vector<std::optional<CandidateSet>> slots(prompts.size());
  std::vector<std::exception_ptr> errors(prompts.size());
  internal::ParallelFor(prompts.size(), options.teacher ? options.workers : 1, [&](std::size_t i) {
    try {
      slots[i] = GenerateCandidates(prompts[i], options, seed);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<CandidateSet> out;
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// ---- filtering ----

Json ToJson(const FilterRules& r) {
  return Json{{"min_chars", r.min_chars},
              {"max_chars", r.max_chars},
              {"min_content_coverage", r.min_content_coverage},
              {"max_token_run", r.max_token_run},
              {"max_char_run", r.max_char_run},
              {"min_distinct_trigram_ratio", r.min_distinct_trigram_ratio},
              {"entity_lexicon", r.entity_lexicon}};
}

FilterRules FilterRulesFromJson(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kInvalidConfig, "filter rules must be an object");
  FilterRules r;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "min_chars") r.min_chars = value.get<std::size_t>();
      else if (key == "max_chars") r.max_chars = value.get<std::size_t>();
      else if (key == "min_content_coverage") r.min_content_coverage = value.get<double>();
      else if (key == "max_token_run") r.max_token_run = value.get<std::size_t>();
      else if (key == "max_char_run") r.max_char_run = value.get<std::size_t>();
      else if (key == "min_distinct_trigram_ratio") r.min_distinct_trigram_ratio = value.get<double>();
      else if (key == "entity_lexicon") r.entity_lexicon = value.get<std::vector<std::string>>();
      else throw Error(ErrorCode::kInvalidConfig, "unknown key filter." + key);
    } catch (const Json::exception&) {
      throw Error(ErrorCode::kInvalidConfig, "bad type for filter." + key);
    }
  }
  if (r.min_chars > r.max_chars) throw Error(ErrorCode::kInvalidConfig, "filter.min_chars > max_chars");
  return r;
}

Json ToJson(const FilterVerdict& v) {
  return Json{{"index", v.index}, {"keep", v.keep}, {"reasons", v.reasons}};
}

std::vector<std::string> ContentWords(std::string_view text_in) {
  static const std::set<std::string> kStop = {
      "a", "an", "the", "of", "in", "on", "at", "to", "and", "or", "with", "for", "from", "by",
      "is", "are", "was", "were", "be", "been", "it", "its", "this", "that", "these", "those",
      "as", "into", "onto", "over", "under", "very", "some", "all", "each", "his", "her",
      "their", "there", "here", "has", "have", "had", "while", "which", "who", "whose",
      "clearly", "exactly", "highly", "detailed", "sharp", "focus",
      "\xE7\x9A\x84" /* 的 */, "\xE4\xBA\x86" /* 了 */, "\xE6\x98\xAF" /* 是 */,
      "\xE5\x9C\xA8" /* 在 */, "\xE5\x92\x8C" /* 和 */, "\xE4\xB8\x8E" /* 与 */,
      "\xE4\xB8\x80" /* 一 */, "\xE4\xB8\xAA" /* 个 */, "\xE6\x9C\x89" /* 有 */,
      "\xE7\x9D\x80" /* 着 */, "\xE8\xBF\x99" /* 这 */, "\xE9\x82\xA3" /* 那 */,
      "\xE4\xB9\x9F" /* 也 */, "\xE9\x83\xBD" /* 都 */, "\xE5\xBE\x88" /* 很 */};
  std::vector<std::string> out;
  for (auto& tok : text::Tokenize(text_in)) {
    if (kStop.count(tok)) continue;
    if (tok.find_first_not_of("-#") == std::string::npos) continue;
    out.push_back(text::ContainsCjk(tok) ? tok : text::Singularize(tok));
  }
  return out;
}

std::vector<std::string> NamedEntities(std::string_view text_in, const FilterRules& rules) {
  std::vector<std::string> out;
  auto add = [&](std::string e) {
    e = text::Trim(e);
    if (e.empty()) return;
    if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(e);
  };
  const std::string s(text_in);
  // Quoted spans.
  for (const auto& [open, close] : std::vector<std::pair<std::string, std::string>>{
           {"\"", "\""}, {"\xE2\x80\x9C", "\xE2\x80\x9D"}, {"\xE3\x80\x8A", "\xE3\x80\x8B"}}) {
    std::size_t pos = 0;
    while ((pos = s.find(open, pos)) != std::string::npos) {
      const auto end = s.find(close, pos + open.size());
      if (end == std::string::npos) break;
      add(s.substr(pos + open.size(), end - pos - open.size()));
      pos = end + close.size();
    }
  }
  // Capitalised runs.
  static const std::set<std::string> kArticles = {"The", "A", "An"};
  static const std::set<std::string> kJoiners = {"of", "the", "de", "von", "van", "and"};
  struct Word {
    std::string text;
    bool sentence_start;
  };
  std::vector<Word> words;
  bool start = true;
  std::string cur;
  bool in_quote = false;
  auto flush = [&] {
    if (!cur.empty()) {
      words.push_back({cur, start});
      start = false;
      cur.clear();
    }
  };
  for (char c : s) {
    if (c == '"') {
      flush();
      in_quote = !in_quote;
      words.push_back({"", false});  // break any run at a quote
      continue;
    }
    if (in_quote) continue;
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '\'') {
      cur.push_back(c);
    } else {
      flush();
      if (c == '.' || c == '!' || c == '?' || c == ':' || c == '(' || c == '/' || c == ';') {
        start = true;
        words.push_back({"", false});
      } else if (c == ',') {
        words.push_back({"", false});
      }
    }
  }
  flush();
  auto capital = [](const std::string& w) {
    return !w.empty() && std::isupper(static_cast<unsigned char>(w[0]));
  };
  for (std::size_t i = 0; i < words.size();) {
    if (!capital(words[i].text)) {
      ++i;
      continue;
    }
    bool at_start = words[i].sentence_start;
    std::size_t b = i;
    if (kArticles.count(words[b].text)) {
      ++b;
      at_start = at_start || true;
      if (b >= words.size() || !capital(words[b].text)) {
        i = b;
        continue;
      }
    }
    std::vector<std::string> run = {words[b].text};
    std::size_t j = b + 1;
    while (j < words.size()) {
      if (capital(words[j].text)) {
        run.push_back(words[j].text);
        ++j;
      } else if (kJoiners.count(words[j].text) && j + 1 < words.size() &&
                 capital(words[j + 1].text)) {
        run.push_back(words[j].text);
        run.push_back(words[j + 1].text);
        j += 2;
      } else {
        break;
      }
    }
    if (run.size() >= 2 || !at_start) add(text::Join(run, " "));
    i = j;
  }
  // Lexicon.
  const auto lower = text::ToLowerAscii(s);
  for (const auto& entry : rules.entity_lexicon) {
    const auto le = text::ToLowerAscii(entry);
    const auto pos = lower.find(le);
    if (!le.empty() && pos != std::string::npos) add(s.substr(pos, le.size()));
  }
  return out;
}

FilterVerdict CheckCandidate(const UserPrompt& prompt, std::string_view candidate,
                             const FilterRules& rules) {
  FilterVerdict v;
  const auto cand = std::string(candidate);
  // semantic_deviation
  const auto want = ContentWords(prompt.text);
  const std::set<std::string> want_set(want.begin(), want.end());
  const auto have = ContentWords(cand);
  const std::set<std::string> have_set(have.begin(), have.end());
  if (!want_set.empty()) {
    std::size_t covered = 0;
    for (const auto& w : want_set) covered += have_set.count(w);
    if (static_cast<double>(covered) / static_cast<double>(want_set.size()) <
        rules.min_content_coverage) {
      v.reasons.emplace_back(kSemanticDeviation);
    }
  }
  // information_loss
  const auto lower = text::ToLowerAscii(cand);
  for (const auto& e : NamedEntities(prompt.text, rules)) {
    if (lower.find(text::ToLowerAscii(e)) == std::string::npos) {
      v.reasons.emplace_back(kInformationLoss);
      break;
    }
  }
  // incoherence
  bool incoherent = false;
  const auto cps = text::CodePoints(cand);
  std::size_t run = 0;
  for (std::size_t i = 0; i < cps.size() && !incoherent; ++i) {
    run = (i > 0 && cps[i] == cps[i - 1] && cps[i] != " ") ? run + 1 : 1;
    if (run >= rules.max_char_run) incoherent = true;
  }
  const auto tokens = text::Tokenize(cand);
  if (!text::Trim(cand).empty() && tokens.empty()) incoherent = true;
  run = 0;
  for (std::size_t i = 0; i < tokens.size() && !incoherent; ++i) {
    run = (i > 0 && tokens[i] == tokens[i - 1]) ? run + 1 : 1;
    if (run >= rules.max_token_run) incoherent = true;
  }
  if (!incoherent && tokens.size() >= 8) {
    std::set<std::string> distinct;
    const std::size_t total = tokens.size() - 2;
    for (std::size_t i = 0; i < total; ++i) {
      distinct.insert(tokens[i] + " " + tokens[i + 1] + " " + tokens[i + 2]);
    }
    if (static_cast<double>(distinct.size()) / static_cast<double>(total) <
        rules.min_distinct_trigram_ratio) {
      incoherent = true;
    }
  }
  if (incoherent) v.reasons.emplace_back(kIncoherence);
  // length_bounds
  const auto len = text::CharLength(text::Trim(cand));
  if (len < rules.min_chars || len > rules.max_chars) v.reasons.emplace_back(kLengthBounds);
  v.keep = v.reasons.empty();
  return v;
}

FilterResult AutoFilter(const CandidateSet& set, const FilterRules& rules, Clock clock) {
  if (set.stage != Stage::kGenerated) {
    throw Error(ErrorCode::kInvalidArgument, "filtering needs a set at stage generated");
  }
  FilterResult out;
  CandidateSet kept = set;
  kept.candidates.clear();
  kept.image_refs.clear();
  for (std::size_t i = 0; i < set.candidates.size(); ++i) {
    auto v = CheckCandidate(set.user_prompt, set.candidates[i], rules);
    v.index = i;
    if (v.keep) {
      kept.candidates.push_back(set.candidates[i]);
      if (!set.image_refs.empty()) kept.image_refs.push_back(set.image_refs[i]);
    }
    out.verdicts.push_back(std::move(v));
  }
  if (kept.candidates.size() >= 2) {
    kept.stage = Stage::kFiltered;
    kept.provenance.push_back({"filtered", IsoUtc(Now(clock))});
    out.survivor = std::move(kept);
  }
  return out;
}

FilterVerdict ReviewCandidate(const UserPrompt& prompt, std::string_view candidate,
                              const endpoint::EndpointConfig& reviewer,
                              const std::optional<std::filesystem::path>& template_path) {
  const auto tmpl = assets::Load("filter_review.md", template_path);
  endpoint::ChatRequest req;
  req.temperature = 0.0;
  req.messages.push_back(
      {"user", assets::Render(tmpl, {{"user_prompt", prompt.text},
                                     {"candidate", std::string(candidate)}})});
  const auto res = endpoint::ChatComplete(req, reviewer);
  const auto b = res.text.find('{');
  const auto e = res.text.rfind('}');
  if (b == std::string::npos || e == std::string::npos || e < b) {
    throw Error(ErrorCode::kMalformedJudgment, "review reply has no JSON object");
  }
  FilterVerdict v;
  try {
    const auto j = Json::parse(res.text.substr(b, e - b + 1));
    for (const auto& r : j.at("reasons")) {
      const auto label = r.get<std::string>();
      if (label != kSemanticDeviation && label != kInformationLoss && label != kIncoherence &&
          label != kLengthBounds) {
        throw Error(ErrorCode::kMalformedJudgment, "unknown review label " + label);
      }
      v.reasons.push_back(label);
    }
  } catch (const Json::exception&) {
    throw Error(ErrorCode::kMalformedJudgment, "review reply is not {\"reasons\": [...]}");
  }
  v.keep = v.reasons.empty();
  return v;
}

}  // namespace promptalign::curation
