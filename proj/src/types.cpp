// Copyright 2026 The geonace Authors
// SPDX-License-Identifier: Apache-2.0

#include "geonace/types.hpp"

#include <algorithm>
#include <cmath>

namespace geonace {

bool BBox::valid() const {
  const auto finite = std::isfinite(min_lon) && std::isfinite(min_lat) && std::isfinite(max_lon) &&
                      std::isfinite(max_lat);
  return finite && min_lon <= max_lon && min_lat <= max_lat && min_lon >= -180.0 && max_lon <= 180.0 &&
         min_lat >= -90.0 && max_lat <= 90.0;
}

bool BBox::contains(const BBox& other) const {
  return min_lon <= other.min_lon && min_lat <= other.min_lat && max_lon >= other.max_lon &&
         max_lat >= other.max_lat;
}

BBox expand_point(double lon, double lat) {
  return BBox{std::max(-180.0, lon - kPointExpansionDeg), std::max(-90.0, lat - kPointExpansionDeg),
              std::min(180.0, lon + kPointExpansionDeg), std::min(90.0, lat + kPointExpansionDeg)};
}

std::string_view to_string(ElementType type) {
  switch (type) {
    case ElementType::kNode: return "node";
    case ElementType::kWay: return "way";
    case ElementType::kRelation: return "relation";
  }
  return "node";
}

std::optional<ElementType> parse_element_type(std::string_view text) {
  if (text == "node") return ElementType::kNode;
  if (text == "way") return ElementType::kWay;
  if (text == "relation") return ElementType::kRelation;
  return std::nullopt;
}

std::string_view to_string(SourceKind kind) {
  switch (kind) {
    case SourceKind::kWikidata: return "wikidata";
    case SourceKind::kWikipedia: return "wikipedia";
    case SourceKind::kWebsite: return "website";
  }
  return "website";
}

std::optional<SourceKind> parse_source_kind(std::string_view text) {
  for (auto k : kSourceKinds) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

std::string_view to_string(ClueSource source) {
  switch (source) {
    case ClueSource::kOsm: return "osm";
    case ClueSource::kSatellite: return "satellite";
    case ClueSource::kWikidata: return "wikidata";
    case ClueSource::kWikipedia: return "wikipedia";
    case ClueSource::kWebsite: return "website";
  }
  return "osm";
}

std::optional<ClueSource> parse_clue_source(std::string_view text) {
  for (auto s : kClueSources) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

ClueSource clue_source_for(SourceKind kind) {
  switch (kind) {
    case SourceKind::kWikidata: return ClueSource::kWikidata;
    case SourceKind::kWikipedia: return ClueSource::kWikipedia;
    case SourceKind::kWebsite: return ClueSource::kWebsite;
  }
  return ClueSource::kWebsite;
}

std::string_view to_string(ImageKind kind) { return kind == ImageKind::kOsm ? "osm" : "satellite"; }

}  // namespace geonace
