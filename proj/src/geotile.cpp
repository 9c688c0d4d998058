// Copyright 2026 The geonace Authors
// SPDX-License-Identifier: Apache-2.0

#include "geonace/geotile.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <optional>
#include <thread>

#include "geonace/error.hpp"
#include "strings.hpp"

namespace geonace {

namespace {

void check_zoom(int z) {
  if (z < 0 || z > kMaxZoom) throw Error(ErrorCode::kDomain, "zoom out of range 0..22: " + std::to_string(z));
}

std::uint32_t clamp_index(double v, std::uint32_t n) {
  if (v < 0) return 0;
  if (v >= static_cast<double>(n)) return n - 1;
  return static_cast<std::uint32_t>(v);
}

double tile_x_real(double lon, int z) { return (lon + 180.0) / 360.0 * std::ldexp(1.0, z); }

double tile_y_real(double lat, int z) {
  const double rad = lat * std::numbers::pi / 180.0;
  return (1.0 - std::asinh(std::tan(rad)) / std::numbers::pi) / 2.0 * std::ldexp(1.0, z);
}

double lat_of_tile_y(double y, int z) {
  const double n = std::numbers::pi * (1.0 - 2.0 * y / std::ldexp(1.0, z));
  return std::atan(std::sinh(n)) * 180.0 / std::numbers::pi;
}

}  // namespace

TileCoord lonlat_to_tile(double lon, double lat, int z) {
  check_zoom(z);
  if (!(std::abs(lat) < kMercatorMaxLat)) {
    throw Error(ErrorCode::kDomain, "latitude outside the Mercator range: " + std::to_string(lat));
  }
  if (!(lon >= -180.0 && lon < 180.0)) {
    throw Error(ErrorCode::kDomain, "longitude outside [-180, 180): " + std::to_string(lon));
  }
  const std::uint32_t n = 1u << z;
  return TileCoord{z, clamp_index(std::floor(tile_x_real(lon, z)), n), clamp_index(std::floor(tile_y_real(lat, z)), n)};
}

LonLat tile_center(const TileCoord& t) {
  check_zoom(t.z);
  const double n = std::ldexp(1.0, t.z);
  return LonLat{(t.x + 0.5) / n * 360.0 - 180.0, lat_of_tile_y(t.y + 0.5, t.z)};
}

LonLat tile_origin(const TileCoord& t) {
  check_zoom(t.z);
  const double n = std::ldexp(1.0, t.z);
  return LonLat{t.x / n * 360.0 - 180.0, lat_of_tile_y(t.y, t.z)};
}

TileGrid grid_for(const BBox& bbox, int z, int tile_px) {
  check_zoom(z);
  if (!bbox.valid()) throw Error(ErrorCode::kDomain, "invalid bbox");
  if (tile_px <= 0) throw Error(ErrorCode::kInvalidArgument, "tile_px must be positive");
  const std::uint32_t n = 1u << z;
  const auto clamp_lat = [](double lat) { return std::clamp(lat, -kMercatorMaxLat, kMercatorMaxLat); };
  TileGrid g;
  g.z = z;
  g.tile_px = tile_px;
  g.x_range = {clamp_index(std::floor(tile_x_real(bbox.min_lon, z)), n),
               clamp_index(std::floor(tile_x_real(bbox.max_lon, z)), n)};
  // North edge has the smaller y index.
  g.y_range = {clamp_index(std::floor(tile_y_real(clamp_lat(bbox.max_lat), z)), n),
               clamp_index(std::floor(tile_y_real(clamp_lat(bbox.min_lat), z)), n)};
  return g;
}

int dynamic_zoom(const BBox& bbox, const ZoomPolicy& policy) {
  if (!bbox.valid()) throw Error(ErrorCode::kDomain, "invalid bbox");
  if (bbox.degenerate()) throw Error(ErrorCode::kDomain, "bbox has zero extent; expand point features first");
  if (policy.max_tiles < 1) throw Error(ErrorCode::kInvalidArgument, "max_tiles must be at least 1");
  if (policy.min_zoom > policy.max_zoom) throw Error(ErrorCode::kInvalidArgument, "min_zoom exceeds max_zoom");
  check_zoom(policy.min_zoom);
  check_zoom(policy.max_zoom);
  const auto limit = static_cast<std::uint32_t>(policy.max_tiles);
  for (int z = policy.max_zoom; z >= policy.min_zoom; --z) {
    const TileGrid g = grid_for(bbox, z);
    if (g.cols() <= limit && g.rows() <= limit) return z;
  }
  return policy.min_zoom;
}

std::string render_tile_url(const std::string& url_template, const TileCoord& tile) {
  std::string out = url_template;
  const auto replace = [&](const std::string& token, const std::string& value) {
    const auto pos = out.find(token);
    if (pos == std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument, "tile URL template lacks " + token + ": " + url_template);
    }
    out.replace(pos, token.size(), value);
  };
  replace("{z}", std::to_string(tile.z));
  replace("{x}", std::to_string(tile.x));
  replace("{y}", std::to_string(tile.y));
  return out;
}

namespace {

std::string coord_str(const TileCoord& t) {
  return "(" + std::to_string(t.z) + "," + std::to_string(t.x) + "," + std::to_string(t.y) + ")";
}

}  // namespace

TileFetcher::TileFetcher(TileProviderConfig config, FetchMode mode, HttpClient* http, FixtureStore* fixtures,
                         std::string user_agent)
    : config_(std::move(config)),
      mode_(mode),
      http_(http),
      fixtures_(fixtures),
      user_agent_(std::move(user_agent)),
      gate_(std::chrono::milliseconds(config_.politeness_delay_ms)) {
  // Validates the template up front.
  render_tile_url(config_.url_template, TileCoord{});
  if (mode_ != FetchMode::kLive && fixtures_ == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, "record/replay needs a fixture store");
  }
  if (mode_ != FetchMode::kReplay && http_ == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, "live fetching needs an HTTP client");
  }
}

std::vector<std::uint8_t> TileFetcher::fetch(const TileCoord& tile) {
  const std::string key = "tile|" + config_.name + "|" + std::to_string(tile.z) + "/" + std::to_string(tile.x) +
                          "/" + std::to_string(tile.y);
  HttpResponse r;
  if (mode_ == FetchMode::kReplay) {
    const auto fx = fixtures_->get(key);
    if (!fx) {
      throw Error(ErrorCode::kFetch, config_.name + " tile " + coord_str(tile) + ": no fixture in replay mode");
    }
    r.status = fx->value("status", 0);
    r.content_type = fx->value("content_type", "");
    r.body = base64_decode(fx->value("body_b64", ""));
  } else {
    const std::string url = render_tile_url(config_.url_template, tile);
    gate_.wait();
    try {
      r = get_with_retry(*http_, url, {{"User-Agent", user_agent_}}, config_.retry);
    } catch (const Error& e) {
      throw Error(ErrorCode::kFetch, config_.name + " tile " + coord_str(tile) + ": " + e.what());
    }
    if (mode_ == FetchMode::kRecord) {
      fixtures_->put(key, {{"status", r.status}, {"content_type", r.content_type}, {"body_b64", base64_encode(r.body)}});
    }
  }
  if (r.status != 200) {
    throw Error(ErrorCode::kFetch,
                config_.name + " tile " + coord_str(tile) + ": HTTP " + std::to_string(r.status));
  }
  return std::vector<std::uint8_t>(r.body.begin(), r.body.end());
}

StitchedImage fetch_and_stitch(const TileGrid& grid, TileFetcher& fetcher, ImageKind provenance) {
  const std::size_t count = static_cast<std::size_t>(grid.cols()) * grid.rows();
  std::vector<std::vector<std::uint8_t>> payloads(count);
  std::vector<std::optional<Error>> errors(count);

  const auto coord_at = [&](std::size_t i) {
    return TileCoord{grid.z, grid.x_range.first + static_cast<std::uint32_t>(i % grid.cols()),
                     grid.y_range.first + static_cast<std::uint32_t>(i / grid.cols())};
  };

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        payloads[i] = fetcher.fetch(coord_at(i));
      } catch (const Error& e) {
        errors[i] = e;
      } catch (const std::exception& e) {
        errors[i] = Error(ErrorCode::kFetch, e.what());
      }
    }
  };
  const std::size_t parallel = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(1, fetcher.config().max_parallel)), 1, count);
  if (parallel == 1) {
    worker();
  } else {
    std::vector<std::jthread> threads;
    for (std::size_t t = 0; t < parallel; ++t) threads.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) throw *e;
  }

  StitchedImage out;
  out.provenance = provenance;
  out.grid = grid;
  out.pixels.width = grid.width_px();
  out.pixels.height = grid.height_px();
  out.pixels.rgb.assign(static_cast<std::size_t>(out.pixels.width) * out.pixels.height * 3, 0);

  for (std::size_t i = 0; i < count; ++i) {
    const TileCoord c = coord_at(i);
    Raster tile;
    try {
      tile = decode_image(payloads[i]);
    } catch (const Error& e) {
      throw Error(ErrorCode::kCorruptTile, fetcher.config().name + " tile " + coord_str(c) + ": " + e.what());
    }
    if (tile.width != grid.tile_px || tile.height != grid.tile_px) {
      throw Error(ErrorCode::kCorruptTile, fetcher.config().name + " tile " + coord_str(c) + ": expected " +
                                               std::to_string(grid.tile_px) + "px square, got " +
                                               std::to_string(tile.width) + "x" + std::to_string(tile.height));
    }
    const std::size_t col = i % grid.cols();
    const std::size_t row = i / grid.cols();
    const std::size_t row_bytes = static_cast<std::size_t>(grid.tile_px) * 3;
    for (int r = 0; r < grid.tile_px; ++r) {
      const std::size_t dst_row = row * grid.tile_px + static_cast<std::size_t>(r);
      auto* dst = out.pixels.rgb.data() + (dst_row * out.pixels.width + col * grid.tile_px) * 3;
      const auto* src = tile.rgb.data() + static_cast<std::size_t>(r) * row_bytes;
      std::copy(src, src + row_bytes, dst);
    }
  }
  return out;
}

}  // namespace geonace
