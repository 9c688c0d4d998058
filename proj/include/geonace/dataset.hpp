// Copyright 2026 The geonace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "geonace/taxonomy.hpp"
#include "geonace/types.hpp"

namespace geonace {

inline constexpr int kDatasetSchemaVersion = 1;
inline constexpr const char* kEntriesFile = "entries.jsonl";
inline constexpr const char* kManifestFile = "manifest.json";

// One external resource attached to an entry. When the text could not be
// stored, text_available is false and only the locator is kept.
struct SourceEntry {
  std::string locator;
  std::string text;
  bool text_available = true;

  friend bool operator==(const SourceEntry&, const SourceEntry&) = default;
};

struct DatasetEntry {
  std::int64_t id = 0;
  ElementType type = ElementType::kNode;
  std::string name;
  BBox bbox;
  std::map<std::string, std::string> osm_tags;
  SectionCode category = SectionCode::from_index(0);
  // Paths relative to the dataset directory.
  std::map<ImageKind, std::string> image_paths;
  std::map<SourceKind, SourceEntry> sources;

  friend bool operator==(const DatasetEntry&, const DatasetEntry&) = default;
};

struct DatasetManifest {
  std::string name = "geonace";
  std::string version = "0";
  std::string created_at;
  std::vector<std::string> attributions;
  // Free-form provenance of the run that produced the dataset.
  nlohmann::json run = nlohmann::json::object();

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

struct Dataset {
  DatasetManifest manifest;
  std::vector<DatasetEntry> entries;

  const DatasetEntry* find(std::int64_t id) const;
  friend bool operator==(const Dataset&, const Dataset&) = default;
};

// Throws kValidation naming the entry id and field.
void validate_entry(const DatasetEntry& entry);

// Heuristic scan of the entry's source texts for an explicit statement of its
// section: the token "NACE" or "section <letter>" for the entry's own letter.
// Returns a description of the first hit.
std::optional<std::string> find_label_leak(const DatasetEntry& entry);

nlohmann::json entry_to_json(const DatasetEntry& entry);
DatasetEntry entry_from_json(const nlohmann::json& j);

// Writes entries.jsonl and manifest.json. Output is byte-stable for equal
// input. Validation (including the leak check) runs before anything is written.
void write_dataset(const Dataset& dataset, const std::filesystem::path& dir);
Dataset read_dataset(const std::filesystem::path& dir);

// Source combinations keyed like "website" or "wikidata+website"; entries
// without any source land in "none".
struct ResourceHistogram {
  std::map<std::string, std::size_t> counts;
  std::vector<std::int64_t> flagged_ids;
};

struct DatasetSummary {
  std::size_t total = 0;
  std::array<std::size_t, kSectionCount> per_section{};
  // Mean count per entry of each resource, indexed by ClueSource order.
  std::array<std::array<double, kClueSourceCount>, kSectionCount> mean_resources{};
  ResourceHistogram histogram;
};

DatasetSummary summarize(const Dataset& dataset);
nlohmann::json summary_to_json(const DatasetSummary& summary);
std::string render_summary(const DatasetSummary& summary);

}  // namespace geonace
