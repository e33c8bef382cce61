// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include "promptalign/annotation.hpp"
#include "promptalign/error.hpp"
#include "promptalign/selection.hpp"
#include "support/stub_server.hpp"

namespace promptalign::curation {
namespace {

namespace fs = std::filesystem;

fs::path TempDir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("promptalign_sel_" + name);
  fs::remove_all(dir);
  return dir;
}

struct FakeClock {
  std::shared_ptr<std::chrono::system_clock::time_point> now =
      std::make_shared<std::chrono::system_clock::time_point>(*ParseIsoUtc("2026-05-01T09:00:00Z"));
  Clock clock() const {
    auto n = now;
    return [n] { return *n; };
  }
  void Advance(std::chrono::seconds s) { *now += s; }
};

CandidateSet Set(int i, std::size_t k = 3) {
  CandidateSet s;
  s.user_prompt.id = "p" + std::to_string(i);
  s.user_prompt.text = std::to_string(i + 2) + " dogs on a beach.";
  s.cot = "keep the count";
  for (std::size_t c = 0; c < k; ++c) {
    s.candidates.push_back("Exactly " + std::to_string(i + 2) + " dogs on a beach, take " +
                           std::to_string(c) + ".");
  }
  s.stage = Stage::kFiltered;
  s.provenance = {{"simulated", "2026-05-01T08:00:00Z"},
                  {"generated", "2026-05-01T08:10:00Z"},
                  {"filtered", "2026-05-01T08:20:00Z"}};
  return s;
}

std::vector<CandidateSet> Sets(int n, std::size_t k = 3) {
  std::vector<CandidateSet> v;
  for (int i = 0; i < n; ++i) v.push_back(Set(i, k));
  return v;
}

class FailOn : public orchestrator::T2iBackend {
 public:
  explicit FailOn(std::string marker) : marker_(std::move(marker)) {}
  bool local() const override { return true; }
  orchestrator::Image Generate(const std::string& text, std::uint64_t seed) const override {
    if (text.find(marker_) != std::string::npos) throw TransportError("503 after retries", true, 503);
    return inner_.Generate(text, seed);
  }

 private:
  std::string marker_;
  orchestrator::MockT2iBackend inner_;
};

std::string Dump(const std::vector<SelectionTask>& tasks) {
  std::string out;
  for (const auto& t : tasks) out += ToJson(t).dump() + "\n";
  return out;
}

TEST(EnqueueTest, MockGeneratorGivesOpenTasksWithImages) {
  const auto dir = TempDir("enqueue");
  TaskStore store(dir);
  const auto sets = Sets(2);
  const auto tasks = EnqueueSelection(sets, orchestrator::MockT2iBackend{}, store);
  ASSERT_EQ(tasks.size(), 2u);
  for (const auto& t : tasks) {
    EXPECT_EQ(t.status, TaskStatus::kOpen);
    ASSERT_EQ(t.set.image_refs.size(), 3u);
    EXPECT_EQ(t.set.stage, Stage::kAwaitingSelection);
    for (const auto& ref : t.set.image_refs) EXPECT_TRUE(fs::is_regular_file(store.images_dir() / ref));
    EXPECT_TRUE(fs::is_regular_file(dir / "tasks" / (t.id + ".json")));
  }
  EXPECT_NE(tasks[0].id, tasks[1].id);
  EXPECT_EQ(store.Stats().open, 2u);
}

TEST(EnqueueTest, GeneratorFailureFlagsTask) {
  TaskStore store(TempDir("enqueue_fail"));
  const auto sets = Sets(2);
  const auto tasks = EnqueueSelection(sets, FailOn("3 dogs on a beach, take 1"), store);
  ASSERT_EQ(tasks.size(), 2u);
  EXPECT_EQ(tasks[0].status, TaskStatus::kOpen);
  EXPECT_EQ(tasks[1].status, TaskStatus::kFlagged);
  EXPECT_NE(tasks[1].flag_reason.find("candidate 1"), std::string::npos);
  EXPECT_EQ(store.Stats().flagged, 1u);
  EXPECT_EQ(store.journal_lines(), 1u);
}

TEST(EnqueueTest, IdsStableAcrossRerunsAndUnique) {
  const auto sets = Sets(20);
  TaskStore a(TempDir("stable_a"));
  TaskStore b(TempDir("stable_b"));
  const auto ta = EnqueueSelection(sets, orchestrator::MockT2iBackend{}, a);
  const auto tb = EnqueueSelection(sets, orchestrator::MockT2iBackend{}, b);
  std::set<std::string> ids;
  for (std::size_t i = 0; i < ta.size(); ++i) {
    EXPECT_EQ(ta[i].id, tb[i].id);
    EXPECT_EQ(ta[i].set.image_refs, tb[i].set.image_refs);
    ids.insert(ta[i].id);
  }
  EXPECT_EQ(ids.size(), 20u);
  // Re-running into the same store adds nothing.
  const auto again = EnqueueSelection(sets, orchestrator::MockT2iBackend{}, a);
  EXPECT_EQ(Dump(again), Dump(ta));
  EXPECT_EQ(a.Tasks().size(), 20u);
}

TEST(EnqueueTest, RequiresFilteredSets) {
  TaskStore store(TempDir("enqueue_stage"));
  auto sets = Sets(1);
  sets[0].stage = Stage::kGenerated;
  EXPECT_THROW(EnqueueSelection(sets, orchestrator::MockT2iBackend{}, store), Error);
}

TEST(TaskStoreTest, LeaseSelectAndDoubleSubmit) {
  FakeClock clock;
  TaskStore store(TempDir("lease"), clock.clock());
  EnqueueSelection(Sets(3), orchestrator::MockT2iBackend{}, store);
  auto lease = store.LeaseNext("ann-1");
  ASSERT_TRUE(lease);
  EXPECT_EQ(lease->expires - *clock.now, TaskStore::kDefaultLease);
  // A leased task is not handed out twice.
  auto second = store.LeaseNext("ann-2");
  ASSERT_TRUE(second);
  EXPECT_NE(second->task.id, lease->task.id);
  EXPECT_EQ(store.Select(lease->task.id, 5, "ann-1"), Outcome::kBadIndex);
  EXPECT_EQ(store.Select(lease->task.id, 2, "ann-1"), Outcome::kOk);
  EXPECT_EQ(store.journal_lines(), 1u);
  EXPECT_EQ(store.Select(lease->task.id, 1, "ann-1"), Outcome::kConflict);
  EXPECT_EQ(store.journal_lines(), 1u);
  EXPECT_EQ(store.Select("task-missing", 0, "ann-1"), Outcome::kNotFound);
  const auto t = store.Get(lease->task.id);
  EXPECT_EQ(t->status, TaskStatus::kDone);
  EXPECT_EQ(t->chosen_index, 2u);
  EXPECT_EQ(t->decided_at, "2026-05-01T09:00:00Z");
}

TEST(TaskStoreTest, ExpiredLeaseRejectedAndTaskRequeued) {
  FakeClock clock;
  TaskStore store(TempDir("expiry"), clock.clock());
  EnqueueSelection(Sets(1), orchestrator::MockT2iBackend{}, store);
  const auto lease = store.LeaseNext("ann-1");
  ASSERT_TRUE(lease);
  EXPECT_FALSE(store.LeaseNext("ann-2"));
  clock.Advance(std::chrono::seconds(601));
  EXPECT_EQ(store.Select(lease->task.id, 0, "ann-1"), Outcome::kLeaseExpired);
  const auto again = store.LeaseNext("ann-2");
  ASSERT_TRUE(again);
  EXPECT_EQ(again->task.id, lease->task.id);
  EXPECT_EQ(store.Select(again->task.id, 0, "ann-2"), Outcome::kOk);
  EXPECT_FALSE(store.LeaseNext("ann-3"));
}

TEST(TaskStoreTest, UnleasedSelectIsRejected) {
  TaskStore store(TempDir("unleased"));
  const auto tasks = EnqueueSelection(Sets(1), orchestrator::MockT2iBackend{}, store);
  EXPECT_EQ(store.Select(tasks[0].id, 0, "a"), Outcome::kLeaseExpired);
}

TEST(TaskStoreTest, ConcurrentSubmitCompletesExactlyOnce) {
  TaskStore store(TempDir("race"));
  const auto tasks = EnqueueSelection(Sets(1), orchestrator::MockT2iBackend{}, store);
  ASSERT_TRUE(store.LeaseNext("shared"));
  std::atomic<int> ok{0}, conflict{0};
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&, i] {
      const auto o = store.Select(tasks[0].id, static_cast<std::size_t>(i % 3), "shared");
      if (o == Outcome::kOk) ++ok;
      if (o == Outcome::kConflict) ++conflict;
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(ok.load(), 1);
  EXPECT_EQ(conflict.load(), 7);
  EXPECT_EQ(store.journal_lines(), 1u);
}

TEST(TaskStoreTest, JournalReplayReconstructsState) {
  const auto dir = TempDir("replay");
  FakeClock clock;
  std::string before;
  {
    TaskStore store(dir, clock.clock());
    EnqueueSelection(Sets(5), orchestrator::MockT2iBackend{}, store);
    for (int i = 0; i < 3; ++i) {
      auto l = store.LeaseNext("ann");
      store.Select(l->task.id, static_cast<std::size_t>(i), "ann");
      clock.Advance(std::chrono::seconds(30));
    }
    auto l = store.LeaseNext("ann");
    store.Flag(l->task.id, "tie between candidates", "ann");
    store.LeaseNext("ann");  // leases are not persisted
    before = Dump(store.Tasks());
  }
  TaskStore reopened(dir, clock.clock());
  EXPECT_EQ(Dump(reopened.Tasks()), before);
  EXPECT_EQ(reopened.journal_lines(), 4u);
  const auto s = reopened.Stats();
  EXPECT_EQ(s.done, 3u);
  EXPECT_EQ(s.flagged, 1u);
  EXPECT_EQ(s.open, 1u);
}

TEST(TaskStoreTest, TamperedJournalIsCorruption) {
  const auto dir = TempDir("tamper");
  {
    TaskStore store(dir);
    EnqueueSelection(Sets(2), orchestrator::MockT2iBackend{}, store);
    auto l = store.LeaseNext("ann");
    store.Select(l->task.id, 0, "ann");
  }
  std::string line;
  {
    std::ifstream in(dir / "journal.jsonl");
    std::getline(in, line);
  }
  const auto pos = line.find("\"chosen_index\":0");
  ASSERT_NE(pos, std::string::npos);
  line.replace(pos, 16, "\"chosen_index\":1");
  {
    std::ofstream out(dir / "journal.jsonl", std::ios::trunc);
    out << line << "\n";
  }
  try {
    TaskStore reopened(dir);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kStoreCorruption);
  }
  {
    std::ofstream out(dir / "journal.jsonl", std::ios::trunc);
    out << "{not json\n";
  }
  EXPECT_THROW(TaskStore{dir}, Error);
}

TEST(FinalizeTest, DoneTasksBecomeTriplets) {
  FakeClock clock;
  TaskStore store(TempDir("finalize"), clock.clock());
  EnqueueSelection(Sets(5), orchestrator::MockT2iBackend{}, store);
  for (std::size_t i = 0; i < 5; ++i) {
    auto l = store.LeaseNext("ann");
    ASSERT_EQ(store.Select(l->task.id, i % 3, "ann"), Outcome::kOk);
  }
  const auto tasks = store.Tasks();
  const auto triplets = Finalize(tasks);
  ASSERT_EQ(triplets.size(), 5u);
  for (std::size_t i = 0; i < triplets.size(); ++i) {
    const auto& tr = triplets[i];
    EXPECT_EQ(tr.selected_index, tasks[i].chosen_index);
    EXPECT_EQ(tr.reprompt, tr.candidates[*tr.selected_index]);
    EXPECT_FALSE(Check(tr).has_value());
    std::set<std::string> stages;
    for (const auto& st : tr.provenance) stages.insert(st.stage);
    for (const auto* want : {"simulated", "generated", "filtered", "selected"}) {
      EXPECT_TRUE(stages.count(want)) << want;
    }
  }
}

TEST(FinalizeTest, OpenOrFlaggedTasksRejected) {
  TaskStore store(TempDir("incomplete"));
  EnqueueSelection(Sets(2), orchestrator::MockT2iBackend{}, store);
  auto l = store.LeaseNext("ann");
  store.Select(l->task.id, 0, "ann");
  auto code = [](const std::vector<SelectionTask>& t) {
    try {
      Finalize(t);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kInvalidArgument;
  };
  EXPECT_EQ(code(store.Tasks()), ErrorCode::kIncompleteSelection);
  const auto open = store.LeaseNext("ann");
  store.Flag(open->task.id, "both wrong", "ann");
  EXPECT_EQ(code(store.Tasks()), ErrorCode::kIncompleteSelection);
}

// ---- HTTP API ----

struct ApiFixture {
  FakeClock clock;
  TaskStore store;
  annotation::Server server;
  int port;
  httplib::Client client;

  explicit ApiFixture(const std::string& name, int tasks)
      : store(TempDir(name), clock.clock()),
        server(store, annotation::ServerOptions{"127.0.0.1", 0, std::nullopt}),
        port((EnqueueSelection(Sets(tasks), orchestrator::MockT2iBackend{}, store), server.Start())),
        client("127.0.0.1", port) {}
};

TEST(AnnotationApiTest, LeaseSelectConflictAndStats) {
  ApiFixture f("api", 3);
  auto next = f.client.Get("/api/tasks/next");
  ASSERT_TRUE(next);
  ASSERT_EQ(next->status, 200);
  const auto view = Json::parse(next->body);
  EXPECT_EQ(view["schema_version"], annotation::kSchemaVersion);
  EXPECT_EQ(view["candidates"].size(), 3u);
  EXPECT_EQ(view["lease_expires_at"], "2026-05-01T09:10:00Z");
  const auto id = view["task_id"].get<std::string>();
  const auto image = view["candidates"][0]["image_url"].get<std::string>();
  auto img = f.client.Get(image.c_str());
  ASSERT_TRUE(img);
  EXPECT_EQ(img->status, 200);
  EXPECT_EQ(img->get_header_value("Content-Type"), "image/svg+xml");
  EXPECT_NE(img->body.find("<svg"), std::string::npos);

  const auto lines_before = f.store.journal_lines();
  auto sel = f.client.Post(("/api/tasks/" + id + "/selection").c_str(), R"({"chosen_index":1})",
                           "application/json");
  ASSERT_TRUE(sel);
  EXPECT_EQ(sel->status, 200);
  EXPECT_EQ(Json::parse(sel->body)["schema_version"], annotation::kSchemaVersion);
  EXPECT_EQ(f.store.journal_lines(), lines_before + 1);
  EXPECT_EQ(f.store.Get(id)->status, TaskStatus::kDone);

  auto dup = f.client.Post(("/api/tasks/" + id + "/selection").c_str(), R"({"chosen_index":0})",
                           "application/json");
  ASSERT_TRUE(dup);
  EXPECT_EQ(dup->status, 409);
  EXPECT_EQ(Json::parse(dup->body)["schema_version"], annotation::kSchemaVersion);
  EXPECT_EQ(f.store.journal_lines(), lines_before + 1);

  auto stats = f.client.Get("/api/stats");
  ASSERT_TRUE(stats);
  const auto s = Json::parse(stats->body);
  EXPECT_EQ(s["open"], 2);
  EXPECT_EQ(s["done"], 1);
  EXPECT_EQ(s["flagged"], 0);
  EXPECT_EQ(s["schema_version"], annotation::kSchemaVersion);
}

TEST(AnnotationApiTest, ExpiredLeaseIs410AndEmptyQueueIs204) {
  ApiFixture f("api_expiry", 1);
  auto next = f.client.Get("/api/tasks/next");
  ASSERT_EQ(next->status, 200);
  const auto id = Json::parse(next->body)["task_id"].get<std::string>();
  auto none = f.client.Get("/api/tasks/next");
  ASSERT_TRUE(none);
  EXPECT_EQ(none->status, 204);
  EXPECT_EQ(none->get_header_value("X-Schema-Version"), "1");
  f.clock.Advance(std::chrono::seconds(700));
  auto late = f.client.Post(("/api/tasks/" + id + "/selection").c_str(), R"({"chosen_index":0})",
                            "application/json");
  ASSERT_TRUE(late);
  EXPECT_EQ(late->status, 410);
  auto flag = f.client.Post(("/api/tasks/" + id + "/flag").c_str(), R"({"reason":"tie"})",
                            "application/json");
  ASSERT_TRUE(flag);
  EXPECT_EQ(flag->status, 200);
  EXPECT_EQ(f.store.Get(id)->status, TaskStatus::kFlagged);
  EXPECT_EQ(f.store.Get(id)->flag_reason, "tie");
}

TEST(AnnotationApiTest, BadRequestsAndMissingThings) {
  ApiFixture f("api_bad", 1);
  auto missing = f.client.Post("/api/tasks/task-nope/flag", "{}", "application/json");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  auto bad = f.client.Post("/api/tasks/x/selection", "not json", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
  auto img = f.client.Get("/images/absent.svg");
  ASSERT_TRUE(img);
  EXPECT_EQ(img->status, 404);
}

TEST(AnnotationApiTest, StopFlushesAndStoreReplays) {
  const auto dir = TempDir("api_stop");
  std::string id;
  {
    TaskStore store(dir);
    EnqueueSelection(Sets(2), orchestrator::MockT2iBackend{}, store);
    annotation::Server server(store, {"127.0.0.1", 0, std::nullopt});
    httplib::Client client("127.0.0.1", server.Start());
    id = Json::parse(client.Get("/api/tasks/next")->body)["task_id"].get<std::string>();
    ASSERT_EQ(client.Post(("/api/tasks/" + id + "/selection").c_str(), R"({"chosen_index":2})",
                          "application/json")->status,
              200);
    server.Stop();
  }
  TaskStore reopened(dir);
  EXPECT_EQ(reopened.Get(id)->chosen_index, 2u);
}

TEST(AnnotationApiTest, BindFailureIsReported) {
  TaskStore store(TempDir("api_bind"));
  // TEST-NET-3 is never assigned to a local interface.
  annotation::Server server(store, {"203.0.113.7", 18080, std::nullopt});
  try {
    server.Start();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBindError);
  }
}

}  // namespace
}  // namespace promptalign::curation
