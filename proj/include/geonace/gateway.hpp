// Copyright 2026 The geonace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "geonace/error.hpp"
#include "geonace/fetch.hpp"
#include "geonace/inference.hpp"

namespace geonace {

struct ChatRequest {
  std::vector<Message> messages;
  int max_tokens = 1024;
  // Image parts are relative to this directory.
  std::filesystem::path image_root;
};

struct Completion {
  std::string text;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  double latency_ms = 0;
};

// Digest of everything that determines a completion, with images identified
// by path. Used to notice when a replayed transcript no longer matches.
std::string request_digest(const ChatRequest& request, const std::string& model_id, double temperature);

class Gateway {
 public:
  virtual ~Gateway() = default;
  // `call_key` names the call stably across runs; see pipeline.hpp.
  virtual Completion complete(const ChatRequest& request, const std::string& call_key) = 0;
  virtual std::string model_id() const = 0;
};

struct GatewayConfig {
  std::string url;  // full chat-completions endpoint
  std::string model;
  double temperature = 0.0;
  std::string api_key_env = "GEONACE_GATEWAY_KEY";
  RetryPolicy retry;
  std::chrono::seconds timeout{120};
};

// Body of an OpenAI-style chat-completions request with images inlined as
// base64 data URIs.
nlohmann::json chat_request_body(const ChatRequest& request, const GatewayConfig& config);
// Extracts choices[0].message.content and usage; throws kGateway.
Completion parse_chat_response(const std::string& body);

class HttpGateway : public Gateway {
 public:
  HttpGateway(GatewayConfig config, std::shared_ptr<HttpClient> http);
  Completion complete(const ChatRequest& request, const std::string& call_key) override;
  std::string model_id() const override { return config_.model; }

 private:
  GatewayConfig config_;
  std::shared_ptr<HttpClient> http_;
};

inline std::string transcript_key(const std::string& call_key) { return "gateway|" + call_key; }
nlohmann::json transcript_to_json(const Completion& completion, const std::string& digest);

// Record/replay wrapper over another gateway, sharing the fixture store
// format used for tiles and sources. In replay mode `inner` may be null.
class TranscriptGateway : public Gateway {
 public:
  TranscriptGateway(FetchMode mode, std::shared_ptr<FixtureStore> store, std::shared_ptr<Gateway> inner,
                    std::string model_id, double temperature, Diagnostics* diagnostics = nullptr);
  Completion complete(const ChatRequest& request, const std::string& call_key) override;
  std::string model_id() const override { return model_id_; }

 private:
  FetchMode mode_;
  std::shared_ptr<FixtureStore> store_;
  std::shared_ptr<Gateway> inner_;
  std::string model_id_;
  double temperature_;
  Diagnostics* diagnostics_;
};

}  // namespace geonace
