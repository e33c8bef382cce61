// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#include "promptalign/selection.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "promptalign/error.hpp"
#include "promptalign/log.hpp"
#include "promptalign/rng.hpp"
#include "promptalign/scene.hpp"
#include "internal.hpp"

namespace promptalign::curation {

namespace fs = std::filesystem;

using internal::Hex;

namespace {

constexpr int kTaskSchema = 1;

[[noreturn]] void Corrupt(const std::string& why) {
  throw Error(ErrorCode::kStoreCorruption, why);
}

void WriteFileAtomic(const fs::path& path, const std::string& body) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << body;
    out.flush();
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + tmp);
  }
  fs::rename(tmp, path);
}

}  // namespace

std::string_view ToString(TaskStatus s) {
  switch (s) {
    case TaskStatus::kOpen: return "open";
    case TaskStatus::kDone: return "done";
    case TaskStatus::kFlagged: return "flagged";
  }
  return "open";
}

std::string_view ToString(Outcome o) {
  switch (o) {
    case Outcome::kOk: return "ok";
    case Outcome::kConflict: return "conflict";
    case Outcome::kLeaseExpired: return "lease_expired";
    case Outcome::kNotFound: return "not_found";
    case Outcome::kBadIndex: return "bad_index";
  }
  return "ok";
}

Json ToJson(const SelectionTask& t) {
  Json j{{"id", t.id},
         {"candidate_set", ToJson(t.set)},
         {"status", ToString(t.status)},
         {"annotator_id", t.annotator_id},
         {"decided_at", t.decided_at}};
  if (t.chosen_index) j["chosen_index"] = *t.chosen_index;
  if (!t.flag_reason.empty()) j["flag_reason"] = t.flag_reason;
  return j;
}

std::optional<FieldProblem> Check(const SelectionTask& t) {
  if (t.id.empty()) return FieldProblem{"id", "must be non-empty"};
  if (auto p = Check(t.set)) return FieldProblem{"candidate_set." + p->field, p->reason};
  if (t.chosen_index.has_value() != (t.status == TaskStatus::kDone)) {
    return FieldProblem{"chosen_index", "present iff status is done"};
  }
  if (t.chosen_index && *t.chosen_index >= t.set.candidates.size()) {
    return FieldProblem{"chosen_index", "out of range"};
  }
  return std::nullopt;
}

std::string TaskId(const CandidateSet& set) {
  std::string key = set.user_prompt.id + "\n" + set.user_prompt.text + "\n" + set.cot;
  for (const auto& c : set.candidates) key += "\n" + c;
  return "task-" + Hex(Fnv1a(key));
}

// ---- store ----

TaskStore::TaskStore(fs::path dir, Clock clock, std::chrono::seconds lease)
    : dir_(std::move(dir)), clock_(std::move(clock)), lease_(lease) {
  fs::create_directories(dir_ / "tasks");
  fs::create_directories(images_dir());
  LoadTasks();
  Replay();
  journal_.open(journal_path(), std::ios::binary | std::ios::app);
  if (!journal_) throw Error(ErrorCode::kIoError, "cannot open " + journal_path().string());
}

std::chrono::system_clock::time_point TaskStore::Now() const {
  return clock_ ? clock_() : std::chrono::system_clock::now();
}

void TaskStore::LoadTasks() {
  for (const auto& e : fs::directory_iterator(dir_ / "tasks")) {
    if (e.path().extension() != ".json") continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    Entry entry;
    try {
      const auto j = Json::parse(ss.str());
      entry.task.id = j.at("id").get<std::string>();
      FromJson(j.at("candidate_set"), entry.task.set);
    } catch (const std::exception& ex) {
      Corrupt("task file " + e.path().filename().string() + ": " + ex.what());
    }
    if (entry.task.id + ".json" != e.path().filename().string()) {
      Corrupt("task file " + e.path().filename().string() + " holds id " + entry.task.id);
    }
    entries_.push_back(std::move(entry));
  }
  std::sort(entries_.begin(), entries_.end(),
            [](const Entry& a, const Entry& b) { return a.task.id < b.task.id; });
}

void TaskStore::Replay() {
  std::ifstream in(journal_path(), std::ios::binary);
  if (!in) return;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto where = "journal line " + std::to_string(n);
    Json j;
    try {
      j = Json::parse(line);
    } catch (const Json::exception&) {
      Corrupt(where + ": not JSON");
    }
    if (!j.is_object() || !j.contains("check") || !j["check"].is_string()) {
      Corrupt(where + ": missing checksum");
    }
    const auto check = j["check"].get<std::string>();
    j.erase("check");
    if (Hex(Fnv1a(j.dump())) != check) Corrupt(where + ": checksum mismatch");
    try {
      if (j.at("seq").get<std::size_t>() != n) Corrupt(where + ": sequence gap");
      const auto id = j.at("task_id").get<std::string>();
      const auto action = j.at("action").get<std::string>();
      auto it = std::find_if(entries_.begin(), entries_.end(),
                             [&](const Entry& e) { return e.task.id == id; });
      if (it == entries_.end()) Corrupt(where + ": unknown task " + id);
      auto& t = it->task;
      if (t.status != TaskStatus::kOpen) Corrupt(where + ": task " + id + " decided twice");
      t.annotator_id = j.at("annotator_id").get<std::string>();
      t.decided_at = j.at("at").get<std::string>();
      if (action == "select") {
        const auto idx = j.at("chosen_index").get<std::size_t>();
        if (idx >= t.set.candidates.size()) Corrupt(where + ": index out of range");
        t.status = TaskStatus::kDone;
        t.chosen_index = idx;
      } else if (action == "flag") {
        t.status = TaskStatus::kFlagged;
        t.flag_reason = j.at("reason").get<std::string>();
      } else {
        Corrupt(where + ": unknown action " + action);
      }
    } catch (const Json::exception& e) {
      Corrupt(where + ": " + e.what());
    }
  }
  journal_lines_ = n;
}

void TaskStore::Append(Json line) {
  line["seq"] = journal_lines_ + 1;
  const auto check = Hex(Fnv1a(line.dump()));
  line["check"] = check;
  journal_ << line.dump() << '\n';
  journal_.flush();
  if (!journal_) throw Error(ErrorCode::kIoError, "journal write failed");
  ++journal_lines_;
}

bool TaskStore::Add(const SelectionTask& task) {
  if (auto p = Check(task.set)) {
    throw Error(ErrorCode::kInvalidArgument, "task " + task.id + ": " + p->field + ": " + p->reason);
  }
  std::lock_guard lock(mu_);
  auto it = std::lower_bound(entries_.begin(), entries_.end(), task.id,
                             [](const Entry& e, const std::string& id) { return e.task.id < id; });
  if (it != entries_.end() && it->task.id == task.id) return false;
  Json j{{"schema_version", kTaskSchema}, {"id", task.id}, {"candidate_set", ToJson(task.set)}};
  WriteFileAtomic(dir_ / "tasks" / (task.id + ".json"), j.dump(2) + "\n");
  Entry e;
  e.task = task;
  e.task.status = TaskStatus::kOpen;
  e.task.chosen_index.reset();
  e.task.annotator_id.clear();
  e.task.decided_at.clear();
  e.task.flag_reason.clear();
  entries_.insert(it, std::move(e));
  return true;
}

std::optional<TaskStore::Lease> TaskStore::LeaseNext(const std::string& annotator) {
  std::lock_guard lock(mu_);
  const auto now = Now();
  for (auto& e : entries_) {
    if (e.task.status != TaskStatus::kOpen) continue;
    if (e.lease_until && *e.lease_until > now) continue;
    e.lease_until = now + lease_;
    e.task.annotator_id = annotator;
    return Lease{e.task, *e.lease_until};
  }
  return std::nullopt;
}

Outcome TaskStore::Select(const std::string& id, std::size_t index, const std::string& annotator) {
  std::lock_guard lock(mu_);
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&](const Entry& e) { return e.task.id == id; });
  if (it == entries_.end()) return Outcome::kNotFound;
  auto& t = it->task;
  if (t.status != TaskStatus::kOpen) return Outcome::kConflict;
  if (index >= t.set.candidates.size()) return Outcome::kBadIndex;
  const auto now = Now();
  if (!it->lease_until || *it->lease_until <= now) return Outcome::kLeaseExpired;
  const auto at = IsoUtc(now);
  Append(Json{{"action", "select"},
              {"task_id", id},
              {"chosen_index", index},
              {"annotator_id", annotator},
              {"at", at}});
  t.status = TaskStatus::kDone;
  t.chosen_index = index;
  t.annotator_id = annotator;
  t.decided_at = at;
  it->lease_until.reset();
  return Outcome::kOk;
}

Outcome TaskStore::Flag(const std::string& id, const std::string& reason,
                        const std::string& annotator) {
  std::lock_guard lock(mu_);
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&](const Entry& e) { return e.task.id == id; });
  if (it == entries_.end()) return Outcome::kNotFound;
  auto& t = it->task;
  if (t.status != TaskStatus::kOpen) return Outcome::kConflict;
  const auto at = IsoUtc(Now());
  Append(Json{{"action", "flag"},
              {"task_id", id},
              {"reason", reason},
              {"annotator_id", annotator},
              {"at", at}});
  t.status = TaskStatus::kFlagged;
  t.flag_reason = reason;
  t.annotator_id = annotator;
  t.decided_at = at;
  it->lease_until.reset();
  return Outcome::kOk;
}

std::optional<SelectionTask> TaskStore::Get(const std::string& id) const {
  std::lock_guard lock(mu_);
  for (const auto& e : entries_) {
    if (e.task.id == id) return e.task;
  }
  return std::nullopt;
}

std::vector<SelectionTask> TaskStore::Tasks() const {
  std::lock_guard lock(mu_);
  std::vector<SelectionTask> out;
  for (const auto& e : entries_) {
    out.push_back(e.task);
    // Lease holders are not persisted.
    if (out.back().status == TaskStatus::kOpen) out.back().annotator_id.clear();
  }
  return out;
}

StoreStats TaskStore::Stats() const {
  std::lock_guard lock(mu_);
  StoreStats s;
  for (const auto& e : entries_) {
    switch (e.task.status) {
      case TaskStatus::kOpen: ++s.open; break;
      case TaskStatus::kDone: ++s.done; break;
      case TaskStatus::kFlagged: ++s.flagged; break;
    }
  }
  return s;
}

std::size_t TaskStore::journal_lines() const {
  std::lock_guard lock(mu_);
  return journal_lines_;
}

void TaskStore::Flush() {
  std::lock_guard lock(mu_);
  journal_.flush();
}

// ---- enqueue / finalize ----

std::vector<SelectionTask> EnqueueSelection(std::span<const CandidateSet> sets,
                                            const orchestrator::T2iBackend& generator,
                                            TaskStore& store, Clock clock) {
  std::vector<SelectionTask> out;
  for (const auto& set : sets) {
    if (set.stage != Stage::kFiltered) {
      throw Error(ErrorCode::kInvalidArgument, "enqueue needs sets at stage filtered");
    }
    const auto id = TaskId(set);
    if (auto existing = store.Get(id)) {
      out.push_back(std::move(*existing));
      continue;
    }
    SelectionTask task;
    task.id = id;
    task.set = set;
    task.set.image_refs.clear();
    std::string failure;
    for (std::size_t i = 0; i < set.candidates.size(); ++i) {
      try {
        const auto img = generator.Generate(set.candidates[i], MixSeeds({Fnv1a(id), i}));
        std::string ref = img.ref;
        if (img.scene) {
          ref += ".svg";
          std::ofstream svg(store.images_dir() / ref, std::ios::binary | std::ios::trunc);
          svg << RenderSvg(*img.scene, set.candidates[i]);
          if (!svg) throw Error(ErrorCode::kIoError, "cannot write image " + ref);
        }
        task.set.image_refs.push_back(ref);
      } catch (const Error& e) {
        failure = "image generation failed for candidate " + std::to_string(i) + ": " + e.what();
        break;
      }
    }
    if (!failure.empty()) task.set.image_refs.clear();
    task.set.stage = Stage::kAwaitingSelection;
    task.set.provenance.push_back(
        {"enqueued", IsoUtc(clock ? clock() : std::chrono::system_clock::now())});
    store.Add(task);
    if (!failure.empty()) {
      log::Logger()->warn("task {} flagged: {}", id, failure);
      store.Flag(id, failure, "system");
    }
    out.push_back(*store.Get(id));
  }
  return out;
}

std::vector<SftTriplet> Finalize(std::span<const SelectionTask> tasks) {
  std::size_t open = 0, flagged = 0;
  for (const auto& t : tasks) {
    if (t.status == TaskStatus::kOpen) ++open;
    if (t.status == TaskStatus::kFlagged) ++flagged;
  }
  if (open + flagged > 0) {
    throw Error(ErrorCode::kIncompleteSelection, std::to_string(open) + " open and " +
                                                     std::to_string(flagged) +
                                                     " flagged tasks remain");
  }
  std::vector<SftTriplet> out;
  for (const auto& t : tasks) {
    if (auto p = Check(t)) {
      throw Error(ErrorCode::kInvalidArgument, t.id + ": " + p->field + ": " + p->reason);
    }
    SftTriplet tr;
    tr.user_prompt = t.set.user_prompt;
    tr.cot = t.set.cot;
    tr.candidates = t.set.candidates;
    tr.selected_index = t.chosen_index;
    tr.reprompt = t.set.candidates[*t.chosen_index];
    tr.provenance = t.set.provenance;
    tr.provenance.push_back({"selected", t.decided_at});
    tr.extra = Json{{"task_id", t.id}, {"annotator_id", t.annotator_id}};
    if (!t.set.image_refs.empty()) tr.extra["image_refs"] = t.set.image_refs;
    out.push_back(std::move(tr));
  }
  return out;
}

}  // namespace promptalign::curation
