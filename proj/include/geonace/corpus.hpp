// Copyright 2026 The geonace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geonace/dataset.hpp"
#include "geonace/error.hpp"
#include "geonace/taxonomy.hpp"
#include "geonace/types.hpp"

namespace geonace {

struct OsmElement {
  std::int64_t id = 0;
  ElementType type = ElementType::kNode;
  std::map<std::string, std::string> tags;
  BBox bbox;
};

// Filters nest: gold implies silver implies bronze.
enum class QualityTier { kBronze = 0, kSilver = 1, kGold = 2 };
std::string_view to_string(QualityTier tier);

std::optional<QualityTier> tier_of(const OsmElement& element, const TagMapping& mapping);

// Number of pool elements carrying each activity tag. Rarer tags win when an
// element's tags point at different sections.
class TagFrequency {
 public:
  TagFrequency() = default;
  TagFrequency(std::span<const OsmElement> pool, const TagMapping& mapping);
  std::size_t count(const OsmTag& tag) const;

 private:
  std::map<OsmTag, std::size_t> counts_;
};

struct LabeledElement {
  OsmElement element;
  SectionCode category = SectionCode::from_index(0);
  std::optional<QualityTier> tier;
};

// Category of the highest-priority activity tag: fewest pool occurrences,
// then lexicographic key=value. Multi-section conflicts go to `diagnostics`.
std::optional<LabeledElement> label(const OsmElement& element, const TagMapping& mapping,
                                    const TagFrequency& frequency = {}, Diagnostics* diagnostics = nullptr);

std::vector<LabeledElement> label_pool(std::span<const OsmElement> pool, const TagMapping& mapping,
                                       Diagnostics* diagnostics = nullptr);

// Gold candidates of one section in seeded random order. The first
// `per_section` of each list are exactly what sample_balanced returns.
std::map<SectionCode, std::vector<LabeledElement>> shuffled_gold_candidates(std::span<const LabeledElement> pool,
                                                                            std::uint64_t seed);

// per_section gold elements for each of the 20 sections (T excluded),
// grouped by section in alphabetical order.
std::vector<LabeledElement> sample_balanced(std::span<const LabeledElement> pool, std::size_t per_section,
                                            std::uint64_t seed);

ResourceHistogram resource_histogram(std::span<const DatasetEntry> entries);

// Element stream ingestion. Accepts line-delimited records
//   {"id":1,"type":"way","tags":{...},"bbox":[min_lon,min_lat,max_lon,max_lat]}
//   {"id":2,"type":"node","tags":{...},"lon":..,"lat":..}
// or an Overpass JSON document ({"elements":[...]} with bounds/lat/lon).
// Node points are expanded by kPointExpansionDeg. Bad records are skipped
// with a diagnostic.
std::vector<OsmElement> parse_element_stream(std::string_view text, Diagnostics& diagnostics);
std::vector<OsmElement> read_element_stream(const std::filesystem::path& path, Diagnostics& diagnostics);

}  // namespace geonace
