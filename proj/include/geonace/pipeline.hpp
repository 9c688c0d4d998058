// Copyright 2026 The geonace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "geonace/dataset.hpp"
#include "geonace/error.hpp"
#include "geonace/gateway.hpp"
#include "geonace/inference.hpp"

namespace geonace {

inline constexpr int kRecordSchemaVersion = 1;
inline constexpr int kClueMaxTokens = 512;

struct RunConfig {
  Pipeline pipeline = Pipeline::kZeroShot;
  InputSelection selection = InputSelection::kAll;
  PromptTemplate tmpl;
  int workers = 1;
  int max_tokens = 1024;
  int clue_max_tokens = kClueMaxTokens;
};

struct InferenceRecord {
  std::int64_t entry_id = 0;
  Pipeline pipeline = Pipeline::kZeroShot;
  InputSelection selection = InputSelection::kAll;
  PromptTemplate tmpl;
  std::string model_id;
  std::vector<ClueText> clues;  // multi_turn only, in ClueSource order
  Prediction prediction;
  bool failed = false;
  std::string error;
  int calls = 0;
  std::int64_t prompt_tokens = 0;
  std::int64_t completion_tokens = 0;
  double latency_ms = 0;

  friend bool operator==(const InferenceRecord&, const InferenceRecord&) = default;
};

// "model|pipeline|selection|variant-mode|entry|stage" where stage is
// "classify", "clue:<source>" or "decision".
std::string call_key(const std::string& model_id, const RunConfig& config, std::int64_t entry_id,
                     const std::string& stage);

// Latency is kept out of the serialized form so reruns are byte-stable.
nlohmann::json record_to_json(const InferenceRecord& record);
InferenceRecord record_from_json(const nlohmann::json& j);

// Reads a records file. A torn last line (no trailing newline)
// is ignored; any other bad line is kParse.
std::vector<InferenceRecord> read_records(const std::filesystem::path& path);

// Runs one entry to completion. Gateway failures are captured in the record.
InferenceRecord run_entry(const DatasetEntry& entry, const RunConfig& config, const Taxonomy& taxonomy,
                          Gateway& gateway, const std::filesystem::path& dataset_dir);

// Runs every dataset entry not already completed in `records_file`, appending
// one fsync'd line per entry in dataset order. Failed records from an earlier
// run are dropped and retried. Returns all records in dataset order.
std::vector<InferenceRecord> run_pipeline(const Dataset& dataset, const std::filesystem::path& dataset_dir,
                                          const RunConfig& config, const Taxonomy& taxonomy, Gateway& gateway,
                                          const std::filesystem::path& records_file,
                                          Diagnostics* diagnostics = nullptr);

}  // namespace geonace
