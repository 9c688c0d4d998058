// Copyright 2026 The geonace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "geonace/cluemetrics.hpp"
#include "geonace/dataset.hpp"
#include "geonace/error.hpp"
#include "geonace/fetch.hpp"

namespace geonace {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kRunManifestFile = "run_manifest.json";

// Flat string settings ("gateway.url" -> "..."). Every command accepts a
// fixed key set; anything else is kInvalidArgument so typos surface early.
class Options {
 public:
  Options() = default;
  explicit Options(std::map<std::string, std::string> values) : values_(std::move(values)) {}

  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  bool has(const std::string& key) const { return values_.contains(key); }
  std::string str(const std::string& key, const std::string& fallback = {}) const;
  std::string required(const std::string& key) const;
  std::int64_t integer(const std::string& key, std::int64_t fallback) const;
  std::uint64_t seed(const std::string& key, std::uint64_t fallback) const;
  double real(const std::string& key, double fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  void check_keys(const std::string& command, const std::set<std::string>& allowed) const;
  const std::map<std::string, std::string>& values() const noexcept { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

// Keys accepted by a command, including the shared ones.
const std::set<std::string>& command_keys(const std::string& command);

struct CommandResult {
  std::filesystem::path out_dir;
  std::string summary;  // short human-readable outcome
};

// Each command reads its inputs from `options`, writes into options["out"],
// and leaves one manifest in that directory. Diagnostics are collected into
// `diagnostics` and also written to <out>/diagnostics.jsonl when non-empty.
// `http` overrides the default client (tests point it at a local server).
CommandResult cmd_map(const Options& options, Diagnostics& diagnostics);
CommandResult cmd_build(const Options& options, Diagnostics& diagnostics, std::shared_ptr<HttpClient> http = nullptr);
CommandResult cmd_classify(const Options& options, Diagnostics& diagnostics,
                           std::shared_ptr<HttpClient> http = nullptr);
CommandResult cmd_score(const Options& options, Diagnostics& diagnostics);
CommandResult cmd_summarize(const Options& options, Diagnostics& diagnostics);

// SHA-256 of a file, or of the sorted (relative path, file digest) list of a
// directory.
std::string digest_path(const std::filesystem::path& path);

}  // namespace geonace
