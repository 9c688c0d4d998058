// Copyright 2026 The geonace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace geonace {

// How network-backed resources are resolved.
//   live:   network only
//   record: network, and every response is written to the fixture store
//   replay: fixture store only; a missing fixture is a fetch error
enum class FetchMode { kLive, kRecord, kReplay };
std::string_view to_string(FetchMode mode);
std::optional<FetchMode> parse_fetch_mode(std::string_view text);

// Directory of response files named by the SHA-256 of a lookup key.
class FixtureStore {
 public:
  explicit FixtureStore(std::filesystem::path dir);

  std::optional<nlohmann::json> get(const std::string& key) const;
  void put(const std::string& key, const nlohmann::json& value);
  std::filesystem::path path_for(const std::string& key) const;
  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::filesystem::path dir_;
  mutable std::mutex mu_;
};

struct HttpResponse {
  int status = 0;
  std::string body;
  std::string content_type;
};

using HttpHeaders = std::multimap<std::string, std::string>;

class HttpClient {
 public:
  virtual ~HttpClient() = default;
  // Transport failures throw kFetch; HTTP error statuses are returned.
  virtual HttpResponse get(const std::string& url, const HttpHeaders& headers) = 0;
  virtual HttpResponse post(const std::string& url, const std::string& body, const std::string& content_type,
                            const HttpHeaders& headers) = 0;
};

std::unique_ptr<HttpClient> make_http_client(std::chrono::seconds timeout = std::chrono::seconds(60));

struct RetryPolicy {
  int attempts = 3;
  int backoff_ms = 250;  // doubled after every failed attempt
};

// Retries transport failures, 429 and 5xx. Returns the final response, which
// may still carry an error status.
HttpResponse get_with_retry(HttpClient& client, const std::string& url, const HttpHeaders& headers,
                            const RetryPolicy& policy);
HttpResponse post_with_retry(HttpClient& client, const std::string& url, const std::string& body,
                             const std::string& content_type, const HttpHeaders& headers, const RetryPolicy& policy);

// Spaces consecutive requests to one host by at least `delay`.
class PolitenessGate {
 public:
  explicit PolitenessGate(std::chrono::milliseconds delay) : delay_(delay) {}
  void wait();

 private:
  std::chrono::milliseconds delay_;
  std::mutex mu_;
  std::chrono::steady_clock::time_point next_{};
};

std::string base64_encode(std::string_view bytes);
std::string base64_decode(std::string_view text);
std::string sha256_hex(std::string_view bytes);

}  // namespace geonace
