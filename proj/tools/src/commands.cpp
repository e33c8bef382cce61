// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "promptalign/annotation.hpp"
#include "promptalign/benchmark.hpp"
#include "promptalign/corpus.hpp"
#include "promptalign/curation.hpp"
#include "promptalign/error.hpp"
#include "promptalign/log.hpp"
#include "promptalign/orchestrator.hpp"
#include "promptalign/selection.hpp"
#include "promptalign/taxonomy.hpp"

namespace promptalign::cli {

namespace fs = std::filesystem;

config::GlobalConfig Globals::Load() const {
  auto cfg = config::Load(config_path);
  if (log_level) cfg.log_level = *log_level;
  log::SetLevel(cfg.log_level);
  return cfg;
}

namespace {

std::optional<fs::path> TemplateIn(const std::optional<std::string>& dir, const char* name) {
  if (!dir) return std::nullopt;
  return fs::path(*dir) / name;
}

// Writes to `path`, or stdout when it is empty or "-".
void Emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path);
  out << text;
}

Json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kSchemaViolation, path + ": " + e.what());
  }
}

std::shared_ptr<orchestrator::T2iBackend> MakeT2i(const config::GlobalConfig& cfg) {
  if (cfg.run.hermetic || !cfg.backends.t2i) {
    return std::make_shared<orchestrator::MockT2iBackend>(
        evaluator::MockT2iOptions{cfg.run.mock_failure_rate});
  }
  return std::make_shared<orchestrator::HttpT2iBackend>(*cfg.backends.t2i);
}

std::shared_ptr<orchestrator::JudgeBackend> MakeJudge(const config::GlobalConfig& cfg) {
  if (cfg.run.hermetic || !cfg.backends.judge) {
    return std::make_shared<orchestrator::OracleJudgeBackend>();
  }
  evaluator::RemoteJudgeOptions o;
  o.endpoint = *cfg.backends.judge;
  o.template_path = TemplateIn(cfg.curation.templates_dir, "judge_keypoint.md");
  return std::make_shared<orchestrator::RemoteJudgeBackend>(o);
}

orchestrator::BackendSet MakeBackends(const config::GlobalConfig& cfg) {
  orchestrator::BackendSet b;
  if (cfg.run.hermetic || !cfg.backends.policy) {
    b.policy = std::make_shared<orchestrator::ToyPolicyBackend>();
  } else {
    b.policy = std::make_shared<orchestrator::ChatPolicyBackend>(
        *cfg.backends.policy, TemplateIn(cfg.curation.templates_dir, "policy_rewrite.md"));
  }
  b.t2i = MakeT2i(cfg);
  b.judge = MakeJudge(cfg);
  return b;
}

std::vector<UserPrompt> LoadPrompts(const config::GlobalConfig& cfg) {
  if (cfg.run.prompts) return corpus::ReadAllStrict<UserPrompt>(*cfg.run.prompts);
  return orchestrator::SyntheticPrompts(cfg.run.synthetic_prompts, cfg.grpo.seed);
}

template <typename T>
int ValidateFile(const std::string& path) {
  std::size_t ok = 0;
  std::size_t bad = 0;
  for (const auto& r : corpus::ReadStream<T>(path)) {
    if (r.ok()) {
      ++ok;
      continue;
    }
    ++bad;
    std::cerr << path << ":" << r.error->line << ": " << r.error->field << ": "
              << r.error->reason << "\n";
  }
  std::cout << ok << " valid, " << bad << " invalid\n";
  return bad == 0 ? 0 : 1;
}

template <typename T>
corpus::StatsReport StatsOf(const std::string& path) {
  const auto records = corpus::ReadAllStrict<T>(path);
  return corpus::DatasetStats(corpus::ToStatsItems(std::span<const T>(records)));
}

std::vector<curation::CandidateSet> ReadSets(const std::string& path) {
  return corpus::ReadAllStrict<curation::CandidateSet>(path);
}

std::atomic<bool> g_stop{false};
extern "C" void OnSignal(int) { g_stop = true; }

}  // namespace

void RegisterCorpusSynth(CLI::App* cmd, const Globals& g, Action& run);

void RegisterTaxonomy(CLI::App& app, const Globals& g, Action& run) {
  auto* cmd = app.add_subcommand("taxonomy", "Inspect the keypoint taxonomy");
  cmd->require_subcommand(1);
  auto out = std::make_shared<std::string>();
  auto* exp = cmd->add_subcommand("export", "Write the taxonomy as JSONL");
  exp->add_option("--out,-o", *out, "Output file (default stdout)");
  exp->callback([&g, &run, out] {
    run = [&g, out] {
      g.Load();
      Emit(*out, taxonomy::ExportJsonl(taxonomy::Registry()));
      return 0;
    };
  });
  auto* val = cmd->add_subcommand("validate", "Check the built-in taxonomy invariants");
  val->callback([&g, &run] {
    run = [&g] {
      g.Load();
      const auto report = taxonomy::ValidateRegistry();
      for (const auto& v : report.violations) std::cerr << v.kind << ": " << v.detail << "\n";
      std::cout << (report.ok() ? "ok" : "invalid") << "\n";
      return report.ok() ? 0 : 1;
    };
  });
}

void RegisterCorpus(CLI::App& app, const Globals& g, Action& run) {
  auto* cmd = app.add_subcommand("corpus", "Validate and summarise JSONL corpora");
  cmd->require_subcommand(1);
  struct Opts {
    std::string kind = "prompt";
    std::string in;
    std::string format = "text";
  };
  auto o = std::make_shared<Opts>();
  const auto kinds = std::vector<std::string>{"prompt", "triplet", "benchmark", "verdict",
                                              "user-prompt", "sft-triplet"};

  auto* val = cmd->add_subcommand("validate", "Report every invalid line");
  val->add_option("--kind", o->kind, "Record kind")->check(CLI::IsMember(kinds));
  val->add_option("--in,-i", o->in, "JSONL file")->required();
  val->callback([&g, &run, o] {
    run = [&g, o]() -> int {
      g.Load();
      switch (*corpus::ParseRecordKind(o->kind)) {
        case corpus::RecordKind::kUserPrompt: return ValidateFile<UserPrompt>(o->in);
        case corpus::RecordKind::kSftTriplet: return ValidateFile<SftTriplet>(o->in);
        case corpus::RecordKind::kBenchmark: return ValidateFile<BenchmarkRecord>(o->in);
        case corpus::RecordKind::kVerdict: return ValidateFile<Verdict>(o->in);
      }
      return 1;
    };
  });

  auto* stats = cmd->add_subcommand("stats", "Language, length, density and theme statistics");
  stats->add_option("--kind", o->kind, "Record kind")
      ->check(CLI::IsMember({"prompt", "triplet", "benchmark", "user-prompt", "sft-triplet"}));
  stats->add_option("--in,-i", o->in, "JSONL file")->required();
  stats->add_option("--format", o->format, "text|json")->check(CLI::IsMember({"text", "json"}));
  stats->callback([&g, &run, o] {
    run = [&g, o] {
      g.Load();
      corpus::StatsReport report;
      switch (*corpus::ParseRecordKind(o->kind)) {
        case corpus::RecordKind::kUserPrompt: report = StatsOf<UserPrompt>(o->in); break;
        case corpus::RecordKind::kSftTriplet: report = StatsOf<SftTriplet>(o->in); break;
        default: report = StatsOf<BenchmarkRecord>(o->in); break;
      }
      std::cout << (o->format == "json" ? ToJson(report).dump(2) + "\n"
                                        : corpus::RenderTable(report));
      return 0;
    };
  });
  RegisterCorpusSynth(cmd, g, run);
}

void RegisterCorpusSynth(CLI::App* cmd, const Globals& g, Action& run) {
  struct Opts {
    std::string kind = "prompt";
    std::string out;
    std::size_t count = 200;
    std::optional<std::uint64_t> seed;
  };
  auto o = std::make_shared<Opts>();
  auto* syn = cmd->add_subcommand("synth", "Write synthetic keypoint-annotated prompts");
  syn->add_option("--kind", o->kind, "prompt|benchmark")->check(CLI::IsMember({"prompt", "benchmark"}));
  syn->add_option("--count,-n", o->count);
  syn->add_option("--seed", o->seed);
  syn->add_option("--out,-o", o->out, "Output JSONL")->required();
  syn->callback([&g, &run, o] {
    run = [&g, o] {
      const auto cfg = g.Load();
      const auto prompts = orchestrator::SyntheticPrompts(o->count, o->seed.value_or(cfg.grpo.seed));
      std::size_t n = 0;
      if (o->kind == "prompt") {
        n = corpus::WriteStream(o->out, prompts);
      } else {
        std::vector<BenchmarkRecord> records;
        for (const auto& p : prompts) {
          BenchmarkRecord r;
          r.id = p.id;
          r.prompt = p.text;
          r.language = p.language;
          r.keypoint_ids = p.keypoint_ids;
          records.push_back(std::move(r));
        }
        n = corpus::WriteStream(o->out, records);
      }
      std::cout << n << " records\n";
      return 0;
    };
  });
}

void RegisterCurate(CLI::App& app, const Globals& g, Action& run) {
  auto* cmd = app.add_subcommand("curate", "Build the rewrite dataset");
  cmd->require_subcommand(1);
  struct Opts {
    std::string in;
    std::string out;
    std::string store;
    std::string verdicts;
    std::size_t count = 0;
    std::optional<std::uint64_t> seed;
  };
  auto o = std::make_shared<Opts>();

  auto* sim = cmd->add_subcommand("simulate", "Shorten source descriptions into user prompts");
  sim->add_option("--in,-i", o->in, "Source UserPrompt JSONL")->required();
  sim->add_option("--out,-o", o->out, "Output JSONL")->required();
  sim->add_option("--count,-n", o->count, "Number of prompts")->required();
  sim->add_option("--seed", o->seed);
  sim->callback([&g, &run, o] {
    run = [&g, o] {
      const auto cfg = g.Load();
      const auto source = corpus::ReadAllStrict<UserPrompt>(o->in);
      curation::SimulateOptions so;
      so.max_chars = cfg.curation.max_chars;
      const auto prompts = curation::SimulatePrompts(source, o->count,
                                                     o->seed.value_or(cfg.grpo.seed), so);
      std::cout << corpus::WriteStream(o->out, prompts) << " prompts\n";
      return 0;
    };
  });

  auto* gen = cmd->add_subcommand("generate", "Teacher reasoning and K candidate rewrites");
  gen->add_option("--in,-i", o->in, "UserPrompt JSONL")->required();
  gen->add_option("--out,-o", o->out, "CandidateSet JSONL")->required();
  gen->add_option("--seed", o->seed);
  gen->callback([&g, &run, o] {
    run = [&g, o] {
      const auto cfg = g.Load();
      const auto prompts = corpus::ReadAllStrict<UserPrompt>(o->in);
      curation::GenerateOptions go;
      if (!cfg.run.hermetic) go.teacher = cfg.backends.teacher;
      go.k = cfg.curation.k;
      go.template_path = TemplateIn(cfg.curation.templates_dir, "teacher_rewrite.md");
      go.malformed_retries = cfg.curation.malformed_retries;
      go.workers = cfg.curation.workers;
      const auto sets = curation::GenerateAll(prompts, go, o->seed.value_or(cfg.grpo.seed));
      std::cout << corpus::WriteStream(o->out, sets) << " candidate sets\n";
      return 0;
    };
  });

  auto* filt = cmd->add_subcommand("filter", "Drop defective candidates");
  filt->add_option("--in,-i", o->in, "CandidateSet JSONL at stage generated")->required();
  filt->add_option("--out,-o", o->out, "Surviving sets")->required();
  filt->add_option("--verdicts", o->verdicts, "Per-candidate verdict JSONL");
  filt->callback([&g, &run, o] {
    run = [&g, o] {
      const auto cfg = g.Load();
      const bool llm = cfg.curation.filter_mode == "llm" && !cfg.run.hermetic;
      if (llm && !cfg.backends.reviewer) {
        throw Error(ErrorCode::kInvalidConfig, "curation.filter_mode llm needs backends.reviewer");
      }
      std::vector<curation::CandidateSet> kept;
      std::string verdict_lines;
      std::size_t dropped = 0;
      for (const auto& set : ReadSets(o->in)) {
        auto result = curation::AutoFilter(set, cfg.curation.filter);
        if (llm && result.survivor) {
          auto& s = *result.survivor;
          std::vector<std::string> pass;
          for (std::size_t i = 0; i < s.candidates.size(); ++i) {
            auto v = curation::ReviewCandidate(
                s.user_prompt, s.candidates[i], *cfg.backends.reviewer,
                TemplateIn(cfg.curation.templates_dir, "filter_review.md"));
            v.index = i;
            if (v.keep) pass.push_back(s.candidates[i]);
            result.verdicts.push_back(v);
          }
          s.candidates = std::move(pass);
          s.image_refs.clear();
          if (s.candidates.size() < 2) result.survivor.reset();
        }
        for (const auto& v : result.verdicts) {
          Json line = ToJson(v);
          line["prompt_id"] = set.user_prompt.id;
          verdict_lines += corpus::SerializeLine(line);
        }
        if (result.survivor) {
          kept.push_back(std::move(*result.survivor));
        } else {
          ++dropped;
        }
      }
      corpus::WriteStream(o->out, kept);
      if (!o->verdicts.empty()) Emit(o->verdicts, verdict_lines);
      std::cout << kept.size() << " kept, " << dropped << " dropped\n";
      return 0;
    };
  });

  auto* enq = cmd->add_subcommand("enqueue", "Render candidates and open selection tasks");
  enq->add_option("--in,-i", o->in, "Filtered CandidateSet JSONL")->required();
  enq->add_option("--store", o->store, "Task store directory (default server.store)");
  enq->callback([&g, &run, o] {
    run = [&g, o] {
      const auto cfg = g.Load();
      const auto sets = ReadSets(o->in);
      curation::TaskStore store(o->store.empty() ? cfg.server.store : o->store, {},
                                std::chrono::seconds(cfg.server.lease_seconds));
      const auto t2i = MakeT2i(cfg);
      const auto tasks = curation::EnqueueSelection(sets, *t2i, store);
      const auto st = store.Stats();
      std::cout << tasks.size() << " tasks (" << st.open << " open, " << st.done << " done, "
                << st.flagged << " flagged)\n";
      return 0;
    };
  });

  auto* fin = cmd->add_subcommand("finalize", "Export selected rewrites as SFT triplets");
  fin->add_option("--store", o->store, "Task store directory (default server.store)");
  fin->add_option("--out,-o", o->out, "SftTriplet JSONL")->required();
  fin->callback([&g, &run, o] {
    run = [&g, o] {
      const auto cfg = g.Load();
      curation::TaskStore store(o->store.empty() ? cfg.server.store : o->store);
      const auto triplets = curation::Finalize(store.Tasks());
      std::cout << corpus::WriteStream(o->out, triplets) << " triplets\n";
      return 0;
    };
  });
}

void RegisterAnnotate(CLI::App& app, const Globals& g, Action& run) {
  auto* cmd = app.add_subcommand("annotate", "Human selection of the best rewrite");
  cmd->require_subcommand(1);
  struct Opts {
    std::string store;
    std::optional<std::string> host;
    std::optional<int> port;
    std::optional<std::string> ui_dir;
  };
  auto o = std::make_shared<Opts>();
  auto* serve = cmd->add_subcommand("serve", "Serve the annotation API until SIGINT/SIGTERM");
  serve->add_option("--store", o->store, "Task store directory (default server.store)");
  serve->add_option("--host", o->host);
  serve->add_option("--port", o->port)->check(CLI::Range(0, 65535));
  serve->add_option("--ui-dir", o->ui_dir, "Static files served at /");
  serve->callback([&g, &run, o] {
    run = [&g, o] {
      const auto cfg = g.Load();
      curation::TaskStore store(o->store.empty() ? cfg.server.store : o->store, {},
                                std::chrono::seconds(cfg.server.lease_seconds));
      annotation::ServerOptions so;
      so.host = o->host.value_or(cfg.server.host);
      so.port = o->port.value_or(cfg.server.port);
      if (auto ui = o->ui_dir ? o->ui_dir : cfg.server.ui_dir) so.ui_dir = *ui;
      annotation::Server server(store, so);
      std::signal(SIGINT, OnSignal);
      std::signal(SIGTERM, OnSignal);
      const int port = server.Start();
      std::cout << "listening on http://" << so.host << ":" << port << std::endl;
      while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
      server.Stop();
      const auto st = store.Stats();
      std::cout << "stopped: " << st.open << " open, " << st.done << " done, " << st.flagged
                << " flagged\n";
      return 0;
    };
  });
}

void RegisterGrpo(CLI::App& app, const Globals& g, Action& run) {
  auto* cmd = app.add_subcommand("grpo", "Group-relative policy optimisation on toy policies");
  cmd->require_subcommand(1);
  struct Opts {
    std::string env = "bandit";
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> steps;
    std::string out;
    std::string policy_out;
  };
  auto o = std::make_shared<Opts>();
  auto* train = cmd->add_subcommand("train", "Train and write the per-step history as JSONL");
  train->add_option("--env", o->env, "bandit|mock-pipeline")
      ->check(CLI::IsMember({"bandit", "mock-pipeline"}));
  train->add_option("--seed", o->seed);
  train->add_option("--steps", o->steps);
  train->add_option("--out,-o", o->out, "History JSONL (default stdout)");
  train->add_option("--policy-out", o->policy_out, "Final policy JSON");
  train->callback([&g, &run, o] {
    run = [&g, o] {
      auto cfg = g.Load();
      if (o->seed) cfg.grpo.seed = *o->seed;
      if (o->steps) cfg.grpo.steps = *o->steps;
      cfg.grpo.Validate();
      std::unique_ptr<grpo::RewardEnv> env;
      if (o->env == "bandit") {
        env = std::make_unique<grpo::BanditEnv>();
      } else {
        env = std::make_unique<orchestrator::MockPipelineEnv>(
            LoadPrompts(cfg), evaluator::MockT2iOptions{cfg.run.mock_failure_rate});
      }
      const auto result = grpo::Train(*env, cfg.grpo);
      std::string lines;
      for (const auto& s : result.history) lines += corpus::SerializeLine(ToJson(s));
      Emit(o->out, lines);
      if (!o->policy_out.empty()) {
        Json heads = Json::array();
        for (const auto& p : result.policy) heads.push_back(ToJson(p));
        Emit(o->policy_out, Json{{"actions", env->Actions()}, {"heads", heads}}.dump(2) + "\n");
      }
      return 0;
    };
  });
}

void RegisterAlign(CLI::App& app, const Globals& g, Action& run) {
  auto* cmd = app.add_subcommand("align", "Online reward alignment of the rewriter");
  cmd->require_subcommand(1);
  struct Opts {
    bool hermetic = false;
    bool resume = false;
    std::optional<std::size_t> stop_after;
  };
  auto o = std::make_shared<Opts>();
  auto* r = cmd->add_subcommand("run", "Run the configured epochs; prints metrics per epoch");
  r->add_flag("--hermetic", o->hermetic, "Use the local toy policy, mock renderer and oracle judge");
  r->add_flag("--resume", o->resume, "Continue from run.checkpoint");
  r->add_option("--stop-after", o->stop_after, "Exit after this many batches");
  r->callback([&g, &run, o] {
    run = [&g, o] {
      auto cfg = g.Load();
      if (o->hermetic) cfg.run.hermetic = true;
      if (cfg.run.checkpoint && fs::exists(*cfg.run.checkpoint) && !o->resume) {
        throw Error(ErrorCode::kInvalidArgument,
                    "checkpoint " + *cfg.run.checkpoint + " exists; pass --resume or remove it");
      }
      orchestrator::RunOptions ro;
      ro.workers = cfg.run.workers;
      if (cfg.run.checkpoint) ro.checkpoint = *cfg.run.checkpoint;
      if (cfg.run.preferences) ro.preferences = *cfg.run.preferences;
      ro.stop_after_batches = o->stop_after;
      const auto prompts = LoadPrompts(cfg);
      orchestrator::Pipeline pipeline(MakeBackends(cfg), cfg.grpo, ro);
      const auto result = pipeline.Run(prompts);
      std::string lines;
      for (const auto& m : result.epochs) lines += corpus::SerializeLine(ToJson(m));
      Emit(cfg.run.metrics.value_or(""), lines);
      if (!result.finished) std::cerr << "stopped before the last epoch\n";
      return 0;
    };
  });
}

void RegisterBench(CLI::App& app, const Globals& g, Action& run) {
  auto* cmd = app.add_subcommand("bench", "Keypoint benchmark");
  cmd->require_subcommand(1);
  struct Opts {
    std::string dataset;
    std::string out;
    std::optional<std::string> edit;
    std::optional<std::uint64_t> seed;
    std::string baseline;
    std::string enhanced;
    std::string format = "text";
    std::size_t top_k = 24;
  };
  auto o = std::make_shared<Opts>();

  auto* r = cmd->add_subcommand("run", "Per-keypoint accuracy table as JSON");
  r->add_option("--dataset,-d", o->dataset, "BenchmarkRecord JSONL")->required();
  r->add_option("--out,-o", o->out, "Accuracy table JSON (default stdout)");
  r->add_option("--rewrite", o->edit, "Rewrite each prompt with a fixed edit first");
  r->add_option("--seed", o->seed);
  r->callback([&g, &run, o] {
    run = [&g, o] {
      const auto cfg = g.Load();
      const auto dataset = corpus::ReadAllStrict<BenchmarkRecord>(o->dataset);
      benchmark::EvaluateOptions eo;
      eo.workers = cfg.run.workers;
      eo.seed = o->seed.value_or(cfg.grpo.seed);
      std::optional<benchmark::FixedEditPolicy> rewriter;
      if (o->edit) {
        rewriter.emplace(*o->edit);
        eo.rewriter = &*rewriter;
      }
      const auto result = benchmark::Evaluate(dataset, *MakeT2i(cfg), *MakeJudge(cfg), eo);
      for (const auto& id : result.errored_ids) std::cerr << "errored: " << id << "\n";
      Emit(o->out, ToJson(result.table).dump(2) + "\n");
      return 0;
    };
  });

  auto* cmp = cmd->add_subcommand("compare", "Per-keypoint delta between two accuracy tables");
  cmp->add_option("--baseline", o->baseline, "Accuracy table JSON")->required();
  cmp->add_option("--enhanced", o->enhanced, "Accuracy table JSON")->required();
  cmp->add_option("--format", o->format, "text|json|csv");
  cmp->add_option("--out,-o", o->out);
  cmp->callback([&g, &run, o] {
    run = [&g, o] {
      g.Load();
      const auto fmt = benchmark::ParseFormat(o->format);
      const auto report =
          benchmark::Compare(benchmark::AccuracyTableFromJson(ReadJsonFile(o->baseline)),
                             benchmark::AccuracyTableFromJson(ReadJsonFile(o->enhanced)));
      Emit(o->out, benchmark::Render(report, fmt));
      return 0;
    };
  });

  auto* an = cmd->add_subcommand("analyze", "Dataset statistics and keypoint co-occurrence");
  an->add_option("--dataset,-d", o->dataset, "BenchmarkRecord JSONL")->required();
  an->add_option("--format", o->format, "text|json|csv");
  an->add_option("--top-k", o->top_k);
  an->add_option("--out,-o", o->out);
  an->callback([&g, &run, o] {
    run = [&g, o] {
      g.Load();
      const auto fmt = benchmark::ParseFormat(o->format);
      const auto dataset = corpus::ReadAllStrict<BenchmarkRecord>(o->dataset);
      Emit(o->out, benchmark::Render(benchmark::Analyze(dataset, o->top_k), fmt));
      return 0;
    };
  });
}

void RegisterConfig(CLI::App& app, const Globals& g, Action& run) {
  auto* cmd = app.add_subcommand("config", "Inspect configuration");
  cmd->require_subcommand(1);
  auto* d = cmd->add_subcommand("print-defaults", "Print the default config as JSON");
  d->callback([&run] {
    run = [] {
      std::cout << config::Defaults().dump(2) << "\n";
      return 0;
    };
  });
  auto* s = cmd->add_subcommand("show", "Print the effective config (file plus environment)");
  s->callback([&g, &run] {
    run = [&g] {
      std::cout << config::ToJson(g.Load()).dump(2) << "\n";
      return 0;
    };
  });
}

}  // namespace promptalign::cli
