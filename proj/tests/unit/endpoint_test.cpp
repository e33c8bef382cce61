// Copyright 2026 The PromptAlign Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <future>
#include <sstream>

#include <spdlog/sinks/ostream_sink.h>

#include "promptalign/endpoint.hpp"
#include "promptalign/error.hpp"
#include "promptalign/log.hpp"
#include "support/stub_server.hpp"

namespace promptalign::endpoint {
namespace {

using promptalign::testing::StubServer;

std::string ChatBody(const std::string& content) {
  return Json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}.dump();
}

EndpointConfig ConfigFor(const StubServer& s) {
  EndpointConfig cfg;
  cfg.base_url = s.url();
  cfg.model = "stub";
  cfg.timeout_s = 5;
  cfg.backoff_initial_ms = 1;
  return cfg;
}

ChatRequest Hello() {
  ChatRequest req;
  req.messages.push_back({"user", "hello there"});
  return req;
}

TEST(EndpointConfigTest, Validation) {
  EndpointConfig cfg;
  cfg.base_url = "http://localhost:1";
  EXPECT_NO_THROW(cfg.Validate());
  auto bad = cfg;
  bad.timeout_s = 0;
  EXPECT_THROW(bad.Validate(), Error);
  bad = cfg;
  bad.max_retries = -1;
  EXPECT_THROW(bad.Validate(), Error);
  bad = cfg;
  bad.max_in_flight = 0;
  EXPECT_THROW(bad.Validate(), Error);
  EXPECT_EQ(EndpointConfigFromJson(ToJson(cfg)), cfg);
  EXPECT_THROW(EndpointConfigFromJson(Json{{"token", "x"}}), Error);
}

TEST(ChatCompleteTest, EchoRoundTrip) {
  StubServer s;
  Json seen;
  s.server().Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    seen = Json::parse(req.body);
    res.set_content(ChatBody(seen["messages"][0]["content"].get<std::string>()),
                    "application/json");
  });
  s.Start();
  auto cfg = ConfigFor(s);
  auto req = Hello();
  req.seed = 42;
  const auto out = ChatComplete(req, cfg);
  EXPECT_EQ(out.text, "hello there");
  EXPECT_EQ(out.attempts, 1);
  EXPECT_FALSE(out.token_logprobs.has_value());
  EXPECT_EQ(seen["model"], "stub");
  EXPECT_EQ(seen["seed"], 42);
  EXPECT_EQ(seen["messages"][0]["role"], "user");
}

TEST(ChatCompleteTest, TokenLogprobsParsed) {
  StubServer s;
  s.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    Json body = Json::parse(ChatBody("ab"));
    body["choices"][0]["logprobs"] = {
        {"content", {{{"token", "a"}, {"logprob", -0.5}}, {{"token", "b"}, {"logprob", -1.0}}}}};
    res.set_content(body.dump(), "application/json");
  });
  s.Start();
  auto req = Hello();
  req.logprobs = true;
  const auto out = ChatComplete(req, ConfigFor(s));
  ASSERT_TRUE(out.token_logprobs.has_value());
  EXPECT_EQ(*out.token_logprobs, (std::vector<double>{-0.5, -1.0}));
}

TEST(ChatCompleteTest, RetriesTransientFailures) {
  StubServer s;
  std::atomic<int> calls{0};
  s.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    if (++calls <= 2) {
      res.status = 503;
      return;
    }
    res.set_content(ChatBody("ok"), "application/json");
  });
  s.Start();
  auto cfg = ConfigFor(s);
  cfg.max_retries = 3;
  const auto out = ChatComplete(Hello(), cfg);
  EXPECT_EQ(out.text, "ok");
  EXPECT_EQ(out.attempts, 3);
  EXPECT_EQ(calls.load(), 3);
}

TEST(ChatCompleteTest, GivesUpAfterMaxRetries) {
  StubServer s;
  std::atomic<int> calls{0};
  s.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 500;
  });
  s.Start();
  auto cfg = ConfigFor(s);
  cfg.max_retries = 2;
  try {
    ChatComplete(Hello(), cfg);
    FAIL();
  } catch (const TransportError& e) {
    EXPECT_TRUE(e.retryable());
    EXPECT_EQ(e.status(), 500);
  }
  EXPECT_EQ(calls.load(), 3);
}

TEST(ChatCompleteTest, ClientErrorIsNotRetried) {
  StubServer s;
  std::atomic<int> calls{0};
  s.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 400;
  });
  s.Start();
  try {
    ChatComplete(Hello(), ConfigFor(s));
    FAIL();
  } catch (const TransportError& e) {
    EXPECT_FALSE(e.retryable());
    EXPECT_EQ(e.status(), 400);
  }
  EXPECT_EQ(calls.load(), 1);
}

TEST(ChatCompleteTest, RateLimitHonoursRetryAfter) {
  StubServer s;
  std::atomic<int> calls{0};
  s.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 429;
    res.set_header("Retry-After", "0.2");
  });
  s.Start();
  auto cfg = ConfigFor(s);
  cfg.max_retries = 1;
  const auto start = std::chrono::steady_clock::now();
  try {
    ChatComplete(Hello(), cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRateLimited);
  }
  const auto waited = std::chrono::steady_clock::now() - start;
  EXPECT_GE(waited, std::chrono::milliseconds(190));
  EXPECT_EQ(calls.load(), 2);
}

TEST(ChatCompleteTest, UnreachableEndpointIsRetryableTransportError) {
  EndpointConfig cfg;
  cfg.base_url = "http://127.0.0.1:1";
  cfg.max_retries = 1;
  cfg.backoff_initial_ms = 1;
  cfg.timeout_s = 1;
  try {
    ChatComplete(Hello(), cfg);
    FAIL();
  } catch (const TransportError& e) {
    EXPECT_TRUE(e.retryable());
  }
}

TEST(ChatCompleteTest, MaxInFlightBoundsConcurrency) {
  StubServer s;
  std::atomic<int> in_flight{0};
  std::atomic<int> peak{0};
  s.server().new_task_queue = [] { return new httplib::ThreadPool(16); };
  s.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    const int now = ++in_flight;
    int prev = peak.load();
    while (now > prev && !peak.compare_exchange_weak(prev, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(30));
    --in_flight;
    res.set_content(ChatBody("ok"), "application/json");
  });
  s.Start();
  auto cfg = ConfigFor(s);
  cfg.max_in_flight = 2;
  std::vector<std::future<ChatResponse>> calls;
  for (int i = 0; i < 10; ++i) {
    calls.push_back(std::async(std::launch::async, [&] { return ChatComplete(Hello(), cfg); }));
  }
  for (auto& c : calls) EXPECT_EQ(c.get().text, "ok");
  EXPECT_LE(peak.load(), 2);
  EXPECT_GE(peak.load(), 1);
}

TEST(ChatCompleteTest, SecretNeverLoggedOrSerialized) {
  const std::string secret = "sk-test-7f3a9c1e55";
  ::setenv("PROMPTALIGN_TEST_TOKEN", secret.c_str(), 1);
  StubServer s;
  std::string auth_seen;
  s.server().Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    auth_seen = req.get_header_value("Authorization");
    // A misbehaving server echoing the credential back.
    res.set_content(ChatBody("token was " + secret), "application/json");
  });
  s.Start();
  auto cfg = ConfigFor(s);
  cfg.auth_env = "PROMPTALIGN_TEST_TOKEN";

  std::ostringstream captured;
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(captured);
  auto logger = log::Logger();
  logger->sinks().push_back(sink);
  const auto old_level = logger->level();
  logger->set_level(spdlog::level::trace);
  auto req = Hello();
  req.messages[0].content = "my key is " + secret;
  ChatComplete(req, cfg);
  logger->set_level(old_level);
  logger->sinks().pop_back();

  EXPECT_EQ(auth_seen, "Bearer " + secret);
  const auto logs = captured.str();
  EXPECT_FALSE(logs.empty());
  EXPECT_EQ(logs.find(secret), std::string::npos) << logs;
  EXPECT_NE(logs.find("***"), std::string::npos);
  EXPECT_EQ(ToJson(cfg).dump().find(secret), std::string::npos);
  ::unsetenv("PROMPTALIGN_TEST_TOKEN");
}

TEST(LogTest, RedactAndLevels) {
  EXPECT_EQ(log::Redact("a-secret-b-secret", {"secret"}), "a-***-b-***");
  EXPECT_EQ(log::Redact("unchanged", {""}), "unchanged");
  EXPECT_THROW(log::SetLevel("loud"), Error);
  EXPECT_NO_THROW(log::SetLevel("warn"));
}

TEST(PostJsonTest, RoundTrip) {
  StubServer s;
  s.server().Post("/render", [&](const httplib::Request& req, httplib::Response& res) {
    auto body = Json::parse(req.body);
    res.set_content(Json{{"image_ref", "img-" + body["prompt"].get<std::string>()}}.dump(),
                    "application/json");
  });
  s.server().Get("/images/x", [&](const httplib::Request&, httplib::Response& res) {
    res.set_content("BYTES", "image/svg+xml");
  });
  s.Start();
  auto cfg = ConfigFor(s);
  EXPECT_EQ(PostJson(cfg, "/render", Json{{"prompt", "cat"}}).body["image_ref"], "img-cat");
  EXPECT_EQ(GetBytes(cfg, "/images/x"), "BYTES");
}

}  // namespace
}  // namespace promptalign::endpoint
