// Copyright 2026 The geonace Authors
// SPDX-License-Identifier: Apache-2.0

#include "geonace/gateway.hpp"

#include <cstdlib>

#include "strings.hpp"

namespace geonace {

std::string request_digest(const ChatRequest& request, const std::string& model_id, double temperature) {
  const nlohmann::json j = {{"model", model_id},
                            {"temperature", temperature},
                            {"max_tokens", request.max_tokens},
                            {"messages", messages_to_json(request.messages)}};
  return sha256_hex(j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace));
}

nlohmann::json chat_request_body(const ChatRequest& request, const GatewayConfig& config) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : request.messages) {
    nlohmann::json content = nlohmann::json::array();
    for (const auto& p : m.parts) {
      if (p.type == MessagePart::Type::kText) {
        content.push_back({{"type", "text"}, {"text", p.text}});
        continue;
      }
      const auto path = request.image_root / p.image_path;
      std::string bytes;
      try {
        bytes = str::read_file(path.string());
      } catch (const Error&) {
        throw Error(ErrorCode::kNotFound, "image part not readable: " + path.string());
      }
      content.push_back({{"type", "image_url"},
                         {"image_url", {{"url", "data:" + p.media_type + ";base64," + base64_encode(bytes)}}}});
    }
    messages.push_back({{"role", m.role}, {"content", content}});
  }
  return {{"model", config.model},
          {"temperature", config.temperature},
          {"max_tokens", request.max_tokens},
          {"messages", messages}};
}

Completion parse_chat_response(const std::string& body) {
  const auto j = nlohmann::json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::kGateway, "gateway response is not JSON");
  if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty()) {
    throw Error(ErrorCode::kGateway, "gateway response has no choices");
  }
  const auto& message = j["choices"][0].value("message", nlohmann::json::object());
  const auto content = message.find("content");
  if (content == message.end()) throw Error(ErrorCode::kGateway, "gateway response has no message content");
  Completion c;
  if (content->is_string()) {
    c.text = content->get<std::string>();
  } else if (content->is_array()) {
    // Some servers answer with a parts list.
    for (const auto& part : *content) {
      if (part.is_object() && part.value("type", "") == "text") c.text += part.value("text", "");
    }
  } else if (!content->is_null()) {
    throw Error(ErrorCode::kGateway, "gateway message content has unexpected type");
  }
  if (j.contains("usage") && j["usage"].is_object()) {
    c.prompt_tokens = j["usage"].value("prompt_tokens", std::int64_t{0});
    c.completion_tokens = j["usage"].value("completion_tokens", std::int64_t{0});
  }
  return c;
}

HttpGateway::HttpGateway(GatewayConfig config, std::shared_ptr<HttpClient> http)
    : config_(std::move(config)), http_(std::move(http)) {
  if (config_.url.empty()) throw Error(ErrorCode::kInvalidArgument, "gateway url is empty");
  if (config_.model.empty()) throw Error(ErrorCode::kInvalidArgument, "gateway model is empty");
}

Completion HttpGateway::complete(const ChatRequest& request, const std::string& call_key) {
  const auto body = chat_request_body(request, config_).dump();
  HttpHeaders headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  const auto start = std::chrono::steady_clock::now();
  HttpResponse r;
  try {
    r = post_with_retry(*http_, config_.url, body, "application/json", headers, config_.retry);
  } catch (const Error& e) {
    throw Error(ErrorCode::kGateway, call_key + ": " + e.what());
  }
  if (r.status != 200) {
    throw Error(ErrorCode::kGateway,
                call_key + ": HTTP " + std::to_string(r.status) + ": " + r.body.substr(0, 200));
  }
  Completion c = parse_chat_response(r.body);
  c.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return c;
}

nlohmann::json transcript_to_json(const Completion& completion, const std::string& digest) {
  return {{"text", completion.text},
          {"prompt_tokens", completion.prompt_tokens},
          {"completion_tokens", completion.completion_tokens},
          {"request_sha256", digest}};
}

TranscriptGateway::TranscriptGateway(FetchMode mode, std::shared_ptr<FixtureStore> store,
                                     std::shared_ptr<Gateway> inner, std::string model_id, double temperature,
                                     Diagnostics* diagnostics)
    : mode_(mode),
      store_(std::move(store)),
      inner_(std::move(inner)),
      model_id_(std::move(model_id)),
      temperature_(temperature),
      diagnostics_(diagnostics) {
  if (mode_ != FetchMode::kLive && !store_) {
    throw Error(ErrorCode::kInvalidArgument, "transcript store required for record/replay");
  }
  if (mode_ != FetchMode::kReplay && !inner_) {
    throw Error(ErrorCode::kInvalidArgument, "live gateway required outside replay mode");
  }
}

Completion TranscriptGateway::complete(const ChatRequest& request, const std::string& call_key) {
  const auto digest = request_digest(request, model_id_, temperature_);
  if (mode_ == FetchMode::kReplay) {
    const auto stored = store_->get(transcript_key(call_key));
    if (!stored) throw Error(ErrorCode::kGateway, "no transcript for " + call_key);
    if (!stored->contains("text") || !(*stored)["text"].is_string()) {
      throw Error(ErrorCode::kParse, "transcript for " + call_key + " has no text");
    }
    const auto recorded = stored->value("request_sha256", "");
    if (diagnostics_ && !recorded.empty() && recorded != digest) {
      diagnostics_->warn("transcript_drift", call_key, "request differs from the recorded one");
    }
    Completion c;
    c.text = (*stored)["text"].get<std::string>();
    c.prompt_tokens = stored->value("prompt_tokens", std::int64_t{0});
    c.completion_tokens = stored->value("completion_tokens", std::int64_t{0});
    return c;
  }
  Completion c = inner_->complete(request, call_key);
  if (mode_ == FetchMode::kRecord) store_->put(transcript_key(call_key), transcript_to_json(c, digest));
  return c;
}

}  // namespace geonace
