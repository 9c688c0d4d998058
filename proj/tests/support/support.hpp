// Copyright 2026 The geonace Authors
// SPDX-License-Identifier: Apache-2.0

// Shared helpers for the unit and acceptance suites.

#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <string>

#include <nlohmann/json.hpp>

#include "geonace/dataset.hpp"
#include "geonace/error.hpp"
#include "geonace/fetch.hpp"
#include "geonace/gateway.hpp"
#include "geonace/geotile.hpp"
#include "geonace/inference.hpp"
#include "geonace/sources.hpp"
#include "geonace/taxonomy.hpp"

namespace geonace::testing {

namespace fs = std::filesystem;

inline fs::path source_dir() { return fs::path(GEONACE_SOURCE_DIR); }
inline fs::path fixture_path(const std::string& rel) { return source_dir() / "tests" / "fixtures" / rel; }
inline fs::path golden_path(const std::string& rel) { return source_dir() / "tests" / "golden" / rel; }
inline fs::path data_path(const std::string& rel) { return source_dir() / "data" / rel; }

inline const Taxonomy& taxonomy() {
  static const Taxonomy t = Taxonomy::load(data_path("nace_lexicon.tsv"));
  return t;
}

inline const TagMapping& mapping() {
  static const TagMapping m = TagMapping::load(data_path("nace_osm_mapping.tsv"));
  return m;
}

std::string slurp(const fs::path& path);
void spit(const fs::path& path, const std::string& content);

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  fs::path path_;
};

// Solid-colour PNG of the given size.
std::string solid_png(int width, int height, std::uint8_t r, std::uint8_t g, std::uint8_t b);

// In-process stand-in for the network. Tile URLs of the form
// http://tiles.test/<provider>/<z>/<x>/<y>.png return a 256px PNG whose
// colour encodes (provider, x, y); other URLs are served from a table.
class FakeWeb : public HttpClient {
 public:
  void add(const std::string& url, HttpResponse response) { table_[url] = std::move(response); }
  // Loads tests/fixtures/e2e/web.json style content.
  void load_sources(const nlohmann::json& web);
  // When set, every request fails the test.
  void set_offline(bool offline) { offline_ = offline; }
  std::size_t requests() const { return requests_; }

  HttpResponse get(const std::string& url, const HttpHeaders& headers) override;
  HttpResponse post(const std::string& url, const std::string& body, const std::string& content_type,
                    const HttpHeaders& headers) override;

 private:
  std::map<std::string, HttpResponse> table_;
  std::atomic<std::size_t> requests_{0};
  std::atomic<bool> offline_{false};
};

inline std::string fake_tile_template(const std::string& provider) {
  return "http://tiles.test/" + provider + "/{z}/{x}/{y}.png";
}

// Gateway driven by a function of (call key, request).
class ScriptedGateway : public Gateway {
 public:
  using Script = std::function<std::string(const std::string& call_key, const ChatRequest& request)>;
  explicit ScriptedGateway(Script script, std::string model = "scripted") : script_(std::move(script)), model_(std::move(model)) {}
  Completion complete(const ChatRequest& request, const std::string& call_key) override;
  std::string model_id() const override { return model_; }
  std::size_t calls() const { return calls_; }
  std::vector<std::string> keys() const;

 private:
  Script script_;
  std::string model_;
  std::atomic<std::size_t> calls_{0};
  mutable std::mutex mu_;
  std::vector<std::string> keys_;
};

// Dataset entry with both images and a website source, for section `letter`.
DatasetEntry make_entry(std::int64_t id, char letter);
// 20 entries, one per section except T, with a mix of sources.
Dataset make_dataset20();
// Gravel pit entry shared across suites.
DatasetEntry heim_kieswerk();

// Named prompt renderings frozen under tests/golden/prompt_<name>.txt.
std::vector<std::string> golden_prompt_names();
std::string render_golden_prompt(const std::string& name);
// Compares against the frozen file, or rewrites it when GEONACE_UPDATE_GOLDENS
// is set. Returns an empty string on a match, else a description of the diff.
std::string check_golden(const std::string& file, const std::string& actual);

}  // namespace geonace::testing
