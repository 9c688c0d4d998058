// Copyright 2026 The geonace Authors
// SPDX-License-Identifier: Apache-2.0

#include "geonace/error.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

namespace geonace {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kFetch: return "fetch";
    case ErrorCode::kUnsupportedContent: return "unsupported_content";
    case ErrorCode::kCorruptTile: return "corrupt_tile";
    case ErrorCode::kGateway: return "gateway";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kLeak: return "leak";
    case ErrorCode::kInternal: return "internal";
  }
  return "unknown";
}

void Diagnostics::warn(std::string code, std::string subject, std::string message) {
  std::lock_guard lock(mu_);
  items_.push_back({std::move(code), std::move(subject), std::move(message)});
}

std::vector<Diagnostic> Diagnostics::snapshot() const {
  std::lock_guard lock(mu_);
  return items_;
}

std::size_t Diagnostics::size() const {
  std::lock_guard lock(mu_);
  return items_.size();
}

void Diagnostics::write_jsonl(const std::string& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write diagnostics to " + path);
  for (const auto& d : snapshot()) {
    nlohmann::json j = {{"code", d.code}, {"subject", d.subject}, {"message", d.message}};
    out << j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
  }
}

}  // namespace geonace
