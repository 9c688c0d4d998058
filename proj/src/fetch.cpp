// Copyright 2026 The geonace Authors
// SPDX-License-Identifier: Apache-2.0

#include "geonace/fetch.hpp"

#include <thread>

#include <openssl/evp.h>

#include "geonace/error.hpp"
#include "strings.hpp"

namespace geonace {

std::string_view to_string(FetchMode mode) {
  switch (mode) {
    case FetchMode::kLive: return "live";
    case FetchMode::kRecord: return "record";
    case FetchMode::kReplay: return "replay";
  }
  return "live";
}

std::optional<FetchMode> parse_fetch_mode(std::string_view text) {
  if (text == "live") return FetchMode::kLive;
  if (text == "record") return FetchMode::kRecord;
  if (text == "replay") return FetchMode::kReplay;
  return std::nullopt;
}

FixtureStore::FixtureStore(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path FixtureStore::path_for(const std::string& key) const {
  return dir_ / (sha256_hex(key) + ".json");
}

std::optional<nlohmann::json> FixtureStore::get(const std::string& key) const {
  const auto path = path_for(key);
  std::lock_guard lock(mu_);
  if (!std::filesystem::exists(path)) return std::nullopt;
  auto j = nlohmann::json::parse(str::read_file(path.string()), nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::kParse, "corrupt fixture " + path.string());
  return j;
}

void FixtureStore::put(const std::string& key, const nlohmann::json& value) {
  std::lock_guard lock(mu_);
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create fixture dir " + dir_.string());
  nlohmann::json stored = value;
  stored["key"] = key;
  const auto path = path_for(key);
  const auto tmp = path.string() + ".tmp";
  str::write_file(tmp, stored.dump(1, ' ', false, nlohmann::json::error_handler_t::replace) + "\n");
  std::filesystem::rename(tmp, path);
}

namespace {

bool retryable(int status) { return status == 429 || status >= 500; }

template <typename Call>
HttpResponse with_retry(const std::string& url, const RetryPolicy& policy, Call&& call) {
  int delay = policy.backoff_ms;
  std::string last_error;
  for (int attempt = 1; attempt <= std::max(1, policy.attempts); ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(std::chrono::milliseconds(delay));
      delay *= 2;
    }
    try {
      HttpResponse r = call();
      if (!retryable(r.status) || attempt == policy.attempts) return r;
      last_error = "HTTP " + std::to_string(r.status);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kFetch) throw;
      last_error = e.what();
    }
  }
  throw Error(ErrorCode::kFetch, url + ": giving up after " + std::to_string(policy.attempts) +
                                     " attempts: " + last_error);
}

}  // namespace

HttpResponse get_with_retry(HttpClient& client, const std::string& url, const HttpHeaders& headers,
                            const RetryPolicy& policy) {
  return with_retry(url, policy, [&] { return client.get(url, headers); });
}

HttpResponse post_with_retry(HttpClient& client, const std::string& url, const std::string& body,
                             const std::string& content_type, const HttpHeaders& headers, const RetryPolicy& policy) {
  return with_retry(url, policy, [&] { return client.post(url, body, content_type, headers); });
}

void PolitenessGate::wait() {
  if (delay_.count() <= 0) return;
  std::chrono::steady_clock::time_point slot;
  {
    std::lock_guard lock(mu_);
    const auto now = std::chrono::steady_clock::now();
    slot = std::max(now, next_);
    next_ = slot + delay_;
  }
  std::this_thread::sleep_until(slot);
}

std::string base64_encode(std::string_view bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(bytes.data()), static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::string base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw Error(ErrorCode::kParse, "base64 length is not a multiple of 4");
  std::string out(3 * text.size() / 4, '\0');
  const int n = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(text.data()), static_cast<int>(text.size()));
  if (n < 0) throw Error(ErrorCode::kParse, "invalid base64");
  std::size_t len = static_cast<std::size_t>(n);
  // EVP_DecodeBlock keeps the zero bytes produced by '=' padding.
  if (!text.empty() && text.back() == '=') --len;
  if (text.size() >= 2 && text[text.size() - 2] == '=') --len;
  out.resize(len);
  return out;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::kInternal, "sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

}  // namespace geonace
