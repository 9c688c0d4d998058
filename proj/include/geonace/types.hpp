// Copyright 2026 The geonace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace geonace {

// WGS84 degrees, ordered [min_lon, min_lat, max_lon, max_lat].
struct BBox {
  double min_lon = 0;
  double min_lat = 0;
  double max_lon = 0;
  double max_lat = 0;

  bool valid() const;
  bool degenerate() const { return min_lon == max_lon || min_lat == max_lat; }
  bool contains(const BBox& other) const;
  friend bool operator==(const BBox&, const BBox&) = default;
};

// Half-width applied on each axis when a point feature needs an extent.
inline constexpr double kPointExpansionDeg = 0.0005;
BBox expand_point(double lon, double lat);

enum class ElementType { kNode, kWay, kRelation };
std::string_view to_string(ElementType type);
std::optional<ElementType> parse_element_type(std::string_view text);

// External text resources, in canonical order.
enum class SourceKind { kWikidata, kWikipedia, kWebsite };
inline constexpr std::array<SourceKind, 3> kSourceKinds = {SourceKind::kWikidata, SourceKind::kWikipedia,
                                                           SourceKind::kWebsite};
std::string_view to_string(SourceKind kind);
std::optional<SourceKind> parse_source_kind(std::string_view text);

// Every input a clue agent can consume, in the fixed reporting order.
enum class ClueSource { kOsm, kSatellite, kWikidata, kWikipedia, kWebsite };
inline constexpr int kClueSourceCount = 5;
inline constexpr std::array<ClueSource, kClueSourceCount> kClueSources = {
    ClueSource::kOsm, ClueSource::kSatellite, ClueSource::kWikidata, ClueSource::kWikipedia, ClueSource::kWebsite};
inline int index_of(ClueSource s) { return static_cast<int>(s); }
std::string_view to_string(ClueSource source);
std::optional<ClueSource> parse_clue_source(std::string_view text);
ClueSource clue_source_for(SourceKind kind);

enum class ImageKind { kOsm, kSatellite };
std::string_view to_string(ImageKind kind);

}  // namespace geonace
