// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

// HTTP API over a TaskStore for the selection UI.

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "promptalign/selection.hpp"

namespace promptalign::annotation {

inline constexpr int kSchemaVersion = 1;

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::optional<std::filesystem::path> ui_dir;  // served at /
};

Json ToJson(const ServerOptions& o);

// Payload of GET /api/tasks/next.
Json TaskView(const curation::TaskStore::Lease& lease);

class Server {
 public:
  Server(curation::TaskStore& store, ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds and serves on a background thread. Returns the bound port.
  // Throws Error{kBindError}.
  int Start();
  // Blocks until Stop() is called from another thread or a signal handler.
  void Wait();
  // Stops accepting requests and flushes the journal.
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace promptalign::annotation
