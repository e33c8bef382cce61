// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#include "promptalign/annotation.hpp"

#include <httplib.h>

#include <condition_variable>
#include <fstream>
#include <sstream>
#include <thread>

#include "promptalign/error.hpp"
#include "promptalign/log.hpp"

namespace promptalign::annotation {

namespace {

std::string Annotator(const httplib::Request& req) {
  if (req.has_header("X-Annotator")) return req.get_header_value("X-Annotator");
  if (req.has_param("annotator")) return req.get_param_value("annotator");
  return "anonymous";
}

void Reply(httplib::Response& res, int status, Json body) {
  body["schema_version"] = kSchemaVersion;
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void ReplyError(httplib::Response& res, int status, const std::string& code,
                const std::string& message) {
  Reply(res, status, Json{{"error", code}, {"message", message}});
}

int StatusFor(curation::Outcome o) {
  switch (o) {
    case curation::Outcome::kOk: return 200;
    case curation::Outcome::kConflict: return 409;
    case curation::Outcome::kLeaseExpired: return 410;
    case curation::Outcome::kNotFound: return 404;
    case curation::Outcome::kBadIndex: return 400;
  }
  return 500;
}

std::string ImageUrl(const std::string& ref) {
  if (ref.rfind("http://", 0) == 0 || ref.rfind("https://", 0) == 0) return ref;
  return "/images/" + ref;
}

std::string ContentType(const std::filesystem::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".webp") return "image/webp";
  return "application/octet-stream";
}

}  // namespace

Json ToJson(const ServerOptions& o) {
  Json j{{"host", o.host}, {"port", o.port}};
  j["ui_dir"] = o.ui_dir ? Json(o.ui_dir->string()) : Json(nullptr);
  return j;
}

Json TaskView(const curation::TaskStore::Lease& lease) {
  const auto& t = lease.task;
  Json cands = Json::array();
  for (std::size_t i = 0; i < t.set.candidates.size(); ++i) {
    Json c{{"index", i}, {"reprompt", t.set.candidates[i]}};
    c["image_url"] = i < t.set.image_refs.size() ? Json(ImageUrl(t.set.image_refs[i]))
                                                 : Json(nullptr);
    cands.push_back(std::move(c));
  }
  return Json{{"task_id", t.id},
              {"user_prompt", t.set.user_prompt.text},
              {"cot", t.set.cot},
              {"candidates", cands},
              {"lease_expires_at", curation::IsoUtc(lease.expires)},
              {"schema_version", kSchemaVersion}};
}

struct Server::Impl {
  curation::TaskStore& store;
  ServerOptions options;
  httplib::Server http;
  std::thread thread;
  std::mutex mu;
  std::condition_variable cv;
  bool stopped = false;

  Impl(curation::TaskStore& s, ServerOptions o) : store(s), options(std::move(o)) {}

  void Routes() {
    http.Get("/api/tasks/next", [this](const httplib::Request& req, httplib::Response& res) {
      auto lease = store.LeaseNext(Annotator(req));
      if (!lease) {
        res.status = 204;
        res.set_header("X-Schema-Version", std::to_string(kSchemaVersion));
        return;
      }
      res.status = 200;
      res.set_content(TaskView(*lease).dump(), "application/json");
    });
    http.Post(R"(/api/tasks/([^/]+)/selection)",
              [this](const httplib::Request& req, httplib::Response& res) {
                const std::string id = req.matches[1];
                std::size_t index = 0;
                try {
                  const auto body = Json::parse(req.body);
                  index = body.at("chosen_index").get<std::size_t>();
                } catch (const Json::exception&) {
                  ReplyError(res, 400, "bad_request", "body must be {\"chosen_index\": n}");
                  return;
                }
                const auto outcome = store.Select(id, index, Annotator(req));
                if (outcome == curation::Outcome::kOk) {
                  Reply(res, 200, Json{{"task_id", id}, {"status", "done"}, {"chosen_index", index}});
                } else {
                  ReplyError(res, StatusFor(outcome), std::string(ToString(outcome)), id);
                }
              });
    http.Post(R"(/api/tasks/([^/]+)/flag)",
              [this](const httplib::Request& req, httplib::Response& res) {
                const std::string id = req.matches[1];
                std::string reason;
                try {
                  const auto body = req.body.empty() ? Json::object() : Json::parse(req.body);
                  if (body.contains("reason")) reason = body["reason"].get<std::string>();
                } catch (const Json::exception&) {
                  ReplyError(res, 400, "bad_request", "body must be {\"reason\": text}");
                  return;
                }
                const auto outcome = store.Flag(id, reason, Annotator(req));
                if (outcome == curation::Outcome::kOk) {
                  Reply(res, 200, Json{{"task_id", id}, {"status", "flagged"}});
                } else {
                  ReplyError(res, StatusFor(outcome), std::string(ToString(outcome)), id);
                }
              });
    http.Get("/api/stats", [this](const httplib::Request&, httplib::Response& res) {
      const auto s = store.Stats();
      Reply(res, 200, Json{{"open", s.open}, {"done", s.done}, {"flagged", s.flagged}});
    });
    http.Get(R"(/images/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      const std::string ref = req.matches[1];
      const auto path = store.images_dir() / ref;
      if (ref.find("..") != std::string::npos || !std::filesystem::is_regular_file(path)) {
        ReplyError(res, 404, "not_found", ref);
        return;
      }
      std::ifstream in(path, std::ios::binary);
      std::stringstream ss;
      ss << in.rdbuf();
      res.set_header("X-Schema-Version", std::to_string(kSchemaVersion));
      res.set_content(ss.str(), ContentType(path));
    });
    if (options.ui_dir) http.set_mount_point("/", options.ui_dir->string());
  }
};

Server::Server(curation::TaskStore& store, ServerOptions options)
    : impl_(std::make_unique<Impl>(store, std::move(options))) {
  impl_->Routes();
}

Server::~Server() { Stop(); }

int Server::Start() {
  int port = impl_->options.port;
  bool ok = false;
  if (port == 0) {
    port = impl_->http.bind_to_any_port(impl_->options.host);
    ok = port > 0;
  } else {
    ok = impl_->http.bind_to_port(impl_->options.host, port);
  }
  if (!ok) {
    throw Error(ErrorCode::kBindError,
                "cannot bind " + impl_->options.host + ":" + std::to_string(impl_->options.port));
  }
  impl_->thread = std::thread([this] { impl_->http.listen_after_bind(); });
  impl_->http.wait_until_ready();
  log::Logger()->info("annotation API on {}:{}", impl_->options.host, port);
  return port;
}

void Server::Wait() {
  std::unique_lock lock(impl_->mu);
  impl_->cv.wait(lock, [this] { return impl_->stopped; });
}

void Server::Stop() {
  {
    std::lock_guard lock(impl_->mu);
    if (impl_->stopped) return;
    impl_->stopped = true;
  }
  impl_->http.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
  impl_->store.Flush();
  impl_->cv.notify_all();
}

}  // namespace promptalign::annotation
