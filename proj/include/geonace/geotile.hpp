// Copyright 2026 The geonace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "geonace/fetch.hpp"
#include "geonace/types.hpp"

namespace geonace {

// Latitude bound of the square Web-Mercator world.
inline constexpr double kMercatorMaxLat = 85.0511;
inline constexpr int kMaxZoom = 22;
inline constexpr int kDefaultTilePx = 256;

struct TileCoord {
  int z = 0;
  std::uint32_t x = 0;
  std::uint32_t y = 0;

  friend bool operator==(const TileCoord&, const TileCoord&) = default;
};

struct LonLat {
  double lon = 0;
  double lat = 0;
};

// XYZ slippy-map index of the tile containing (lon, lat). Throws kDomain
// outside |lat| < 85.0511, -180 <= lon < 180, or 0 <= z <= 22.
TileCoord lonlat_to_tile(double lon, double lat, int z);
LonLat tile_center(const TileCoord& tile);
// North-west corner of the tile.
LonLat tile_origin(const TileCoord& tile);

struct IndexRange {
  std::uint32_t first = 0;
  std::uint32_t last = 0;  // inclusive

  std::uint32_t size() const { return last - first + 1; }
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

struct TileGrid {
  int z = 0;
  IndexRange x_range;
  IndexRange y_range;
  int tile_px = kDefaultTilePx;

  std::uint32_t cols() const { return x_range.size(); }
  std::uint32_t rows() const { return y_range.size(); }
  int width_px() const { return static_cast<int>(cols()) * tile_px; }
  int height_px() const { return static_cast<int>(rows()) * tile_px; }
  friend bool operator==(const TileGrid&, const TileGrid&) = default;
};

// Smallest grid covering the bbox corners at zoom z. Latitudes beyond the
// Mercator bound are clamped to the edge rows.
TileGrid grid_for(const BBox& bbox, int z, int tile_px = kDefaultTilePx);

// Largest zoom in [min_zoom, max_zoom] at which the covering grid has at
// most max_tiles tiles along each axis; min_zoom when none qualifies.
struct ZoomPolicy {
  int max_tiles = 4;
  int min_zoom = 10;
  int max_zoom = 19;
};

// Throws kDomain for an invalid or zero-extent bbox (expand points first).
int dynamic_zoom(const BBox& bbox, const ZoomPolicy& policy = {});

// 8-bit RGB raster, row-major.
struct Raster {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  friend bool operator==(const Raster&, const Raster&) = default;
};

// PNG or JPEG by signature; throws kCorruptTile otherwise.
Raster decode_image(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_png(const Raster& raster);
void write_png(const Raster& raster, const std::string& path);

struct TileProviderConfig {
  std::string name;
  std::string url_template;  // must contain {z}, {x} and {y}
  int max_parallel = 2;
  int politeness_delay_ms = 0;
  std::string attribution;
  RetryPolicy retry;
};

std::string render_tile_url(const std::string& url_template, const TileCoord& tile);

// Tile bytes for one provider, resolved through the fixture store according
// to the fetch mode.
class TileFetcher {
 public:
  TileFetcher(TileProviderConfig config, FetchMode mode, HttpClient* http, FixtureStore* fixtures,
              std::string user_agent = "geonace");

  // Throws kFetch naming (z,x,y) after retries are exhausted.
  std::vector<std::uint8_t> fetch(const TileCoord& tile);
  const TileProviderConfig& config() const noexcept { return config_; }

 private:
  TileProviderConfig config_;
  FetchMode mode_;
  HttpClient* http_;
  FixtureStore* fixtures_;
  std::string user_agent_;
  PolitenessGate gate_;
};

struct StitchedImage {
  Raster pixels;
  ImageKind provenance = ImageKind::kOsm;
  TileGrid grid;
};

// Fetches every tile of the grid (up to max_parallel at once) and assembles
// them row-major with (x_range.first, y_range.first) at the top left.
StitchedImage fetch_and_stitch(const TileGrid& grid, TileFetcher& fetcher, ImageKind provenance);

}  // namespace geonace
