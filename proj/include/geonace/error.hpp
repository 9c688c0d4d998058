// Copyright 2026 The geonace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace geonace {

enum class ErrorCode {
  kInvalidArgument,
  kIo,
  kValidation,
  kParse,
  kDomain,
  kFetch,
  kUnsupportedContent,
  kCorruptTile,
  kGateway,
  kNotFound,
  kLeak,
  kInternal,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// A non-fatal finding, e.g. a skipped locator or an ambiguous label.
struct Diagnostic {
  std::string code;
  std::string subject;
  std::string message;
};

// Thread-safe sink for warnings; written out as one JSON object per line.
class Diagnostics {
 public:
  void warn(std::string code, std::string subject, std::string message);
  std::vector<Diagnostic> snapshot() const;
  std::size_t size() const;
  void write_jsonl(const std::string& path) const;

 private:
  mutable std::mutex mu_;
  std::vector<Diagnostic> items_;
};

}  // namespace geonace
