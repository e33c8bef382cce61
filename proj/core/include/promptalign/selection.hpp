// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

// Human selection queue: a directory of task files plus an append-only
// journal of decisions.

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "promptalign/curation.hpp"
#include "promptalign/orchestrator.hpp"
#include "promptalign/records.hpp"

namespace promptalign::curation {

enum class TaskStatus { kOpen, kDone, kFlagged };
std::string_view ToString(TaskStatus s);

struct SelectionTask {
  std::string id;
  CandidateSet set;
  TaskStatus status = TaskStatus::kOpen;
  std::optional<std::size_t> chosen_index;  // set iff done
  std::string annotator_id;
  std::string decided_at;
  std::string flag_reason;

  bool operator==(const SelectionTask&) const = default;
};

Json ToJson(const SelectionTask& t);
std::optional<FieldProblem> Check(const SelectionTask& t);

// Stable across runs: derived from the prompt id, CoT and candidate texts.
std::string TaskId(const CandidateSet& set);

enum class Outcome { kOk, kConflict, kLeaseExpired, kNotFound, kBadIndex };
std::string_view ToString(Outcome o);

struct StoreStats {
  std::size_t open = 0;
  std::size_t done = 0;
  std::size_t flagged = 0;
};

class TaskStore {
 public:
  static constexpr std::chrono::seconds kDefaultLease{600};

  // Opens or creates <dir>/tasks, <dir>/images and <dir>/journal.jsonl and
  // replays the journal. Throws Error{kStoreCorruption}.
  explicit TaskStore(std::filesystem::path dir, Clock clock = {},
                     std::chrono::seconds lease = kDefaultLease);

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path images_dir() const { return dir_ / "images"; }
  std::filesystem::path journal_path() const { return dir_ / "journal.jsonl"; }

  // Writes the task file. Returns false when the id already exists.
  bool Add(const SelectionTask& task);

  struct Lease {
    SelectionTask task;
    std::chrono::system_clock::time_point expires;
  };
  // Oldest open task without a live lease, in id order.
  std::optional<Lease> LeaseNext(const std::string& annotator);
  // Completes a leased task exactly once.
  Outcome Select(const std::string& id, std::size_t index, const std::string& annotator);
  Outcome Flag(const std::string& id, const std::string& reason, const std::string& annotator);

  std::optional<SelectionTask> Get(const std::string& id) const;
  std::vector<SelectionTask> Tasks() const;
  StoreStats Stats() const;
  std::size_t journal_lines() const;
  void Flush();

 private:
  struct Entry {
    SelectionTask task;
    std::optional<std::chrono::system_clock::time_point> lease_until;
  };
  void LoadTasks();
  void Replay();
  void Append(Json line);
  std::chrono::system_clock::time_point Now() const;

  std::filesystem::path dir_;
  Clock clock_;
  std::chrono::seconds lease_;
  mutable std::mutex mu_;
  std::vector<Entry> entries_;  // sorted by id
  std::size_t journal_lines_ = 0;
  std::ofstream journal_;
};

// Renders one image per candidate and adds an open task per set. A set whose
// images cannot be produced becomes a flagged task. Sets must be at stage
// filtered. Re-running on the same input returns the existing tasks.
std::vector<SelectionTask> EnqueueSelection(std::span<const CandidateSet> sets,
                                            const orchestrator::T2iBackend& generator,
                                            TaskStore& store, Clock clock = {});

// One triplet per done task. Throws Error{kIncompleteSelection} when any task
// is open or flagged.
std::vector<SftTriplet> Finalize(std::span<const SelectionTask> tasks);

}  // namespace promptalign::curation
