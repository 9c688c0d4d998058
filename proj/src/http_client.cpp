// Copyright 2026 The geonace Authors
// SPDX-License-Identifier: Apache-2.0

// The only translation unit that includes cpp-httplib.

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "geonace/error.hpp"
#include "geonace/fetch.hpp"

namespace geonace {

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string target;  // /path?query
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(ErrorCode::kInvalidArgument, "not an absolute URL: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

class HttplibClient final : public HttpClient {
 public:
  explicit HttplibClient(std::chrono::seconds timeout) : timeout_(timeout) {}

  HttpResponse get(const std::string& url, const HttpHeaders& headers) override {
    const auto u = split_url(url);
    auto cli = make(u.origin);
    return convert(url, cli.Get(u.target, to_headers(headers)));
  }

  HttpResponse post(const std::string& url, const std::string& body, const std::string& content_type,
                    const HttpHeaders& headers) override {
    const auto u = split_url(url);
    auto cli = make(u.origin);
    return convert(url, cli.Post(u.target, to_headers(headers), body, content_type));
  }

 private:
  httplib::Client make(const std::string& origin) const {
    httplib::Client cli(origin);
    cli.set_follow_location(true);
    cli.set_connection_timeout(timeout_);
    cli.set_read_timeout(timeout_);
    cli.set_write_timeout(timeout_);
    return cli;
  }

  static httplib::Headers to_headers(const HttpHeaders& headers) {
    return httplib::Headers(headers.begin(), headers.end());
  }

  static HttpResponse convert(const std::string& url, const httplib::Result& res) {
    if (!res) {
      throw Error(ErrorCode::kFetch, url + ": " + httplib::to_string(res.error()));
    }
    return HttpResponse{res->status, res->body, res->get_header_value("Content-Type")};
  }

  std::chrono::seconds timeout_;
};

}  // namespace

std::unique_ptr<HttpClient> make_http_client(std::chrono::seconds timeout) {
  return std::make_unique<HttplibClient>(timeout);
}

}  // namespace geonace
