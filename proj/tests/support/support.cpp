// Copyright 2026 The geonace Authors
// SPDX-License-Identifier: Apache-2.0

#include "support.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace geonace::testing {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  std::random_device rd;
  path_ = fs::temp_directory_path() /
          ("geonace-" + tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string solid_png(int width, int height, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  Raster raster;
  raster.width = width;
  raster.height = height;
  raster.rgb.resize(static_cast<std::size_t>(width) * height * 3);
  for (std::size_t i = 0; i < raster.rgb.size(); i += 3) {
    raster.rgb[i] = r;
    raster.rgb[i + 1] = g;
    raster.rgb[i + 2] = b;
  }
  const auto bytes = encode_png(raster);
  return std::string(bytes.begin(), bytes.end());
}

void FakeWeb::load_sources(const nlohmann::json& web) {
  for (const auto& [qid, entity] : web.at("wikidata").items()) {
    add(wikidata_url(qid), {200, entity.dump(), "application/json"});
  }
  for (const auto& [locator, extract] : web.at("wikipedia").items()) {
    const nlohmann::json body = {{"query", {{"pages", {{{"title", locator}, {"extract", extract}}}}}}};
    add(wikipedia_url(locator), {200, body.dump(), "application/json"});
  }
  for (const auto& [url, page] : web.at("website").items()) {
    add(url, {page.at("status").get<int>(), page.at("body").get<std::string>(),
              page.at("content_type").get<std::string>()});
  }
}

HttpResponse FakeWeb::get(const std::string& url, const HttpHeaders&) {
  ++requests_;
  if (offline_) throw std::logic_error("network access while offline: " + url);
  const std::string prefix = "http://tiles.test/";
  if (url.rfind(prefix, 0) == 0) {
    std::string provider, rest = url.substr(prefix.size());
    provider = rest.substr(0, rest.find('/'));
    rest = rest.substr(provider.size() + 1);
    int z = 0;
    unsigned x = 0, y = 0;
    if (std::sscanf(rest.c_str(), "%d/%u/%u.png", &z, &x, &y) != 3) return {404, "bad tile url", "text/plain"};
    const auto base = provider == "osm" ? 40 : 160;
    return {200,
            solid_png(kDefaultTilePx, kDefaultTilePx, static_cast<std::uint8_t>(base + x % 50),
                      static_cast<std::uint8_t>(y % 250), static_cast<std::uint8_t>(z * 10)),
            "image/png"};
  }
  const auto it = table_.find(url);
  if (it == table_.end()) return {404, "not found", "text/plain"};
  return it->second;
}

HttpResponse FakeWeb::post(const std::string& url, const std::string&, const std::string&, const HttpHeaders&) {
  ++requests_;
  if (offline_) throw std::logic_error("network access while offline: " + url);
  return {405, "", "text/plain"};
}

Completion ScriptedGateway::complete(const ChatRequest& request, const std::string& call_key) {
  ++calls_;
  {
    std::lock_guard lock(mu_);
    keys_.push_back(call_key);
  }
  Completion c;
  c.text = script_(call_key, request);
  c.prompt_tokens = 10;
  c.completion_tokens = 1;
  return c;
}

std::vector<std::string> ScriptedGateway::keys() const {
  std::lock_guard lock(mu_);
  return keys_;
}

DatasetEntry make_entry(std::int64_t id, char letter) {
  DatasetEntry e;
  e.id = id;
  e.type = ElementType::kWay;
  e.name = std::string("Entity ") + letter + " " + std::to_string(id);
  e.bbox = BBox{10.0 + letter * 0.01, 50.0, 10.001 + letter * 0.01, 50.0015};
  e.osm_tags = {{"name", e.name}, {"addr:city", "Neustadt"}, {"website", "https://e" + std::to_string(id) + ".test/"}};
  e.category = SectionCode::parse(std::string(1, letter));
  e.image_paths = {{ImageKind::kOsm, "images/" + std::to_string(id) + "_osm.png"},
                   {ImageKind::kSatellite, "images/" + std::to_string(id) + "_satellite.png"}};
  e.sources[SourceKind::kWebsite] = {"https://e" + std::to_string(id) + ".test/", "Opening hours 8-18. Call us.", true};
  return e;
}

Dataset make_dataset20() {
  Dataset d;
  d.manifest.name = "fixture";
  d.manifest.version = "1";
  d.manifest.created_at = "2026-01-01T00:00:00Z";
  d.manifest.attributions = {"test tiles"};
  std::int64_t id = 100;
  for (auto s : all_sections()) {
    if (is_household_section(s)) continue;
    auto e = make_entry(id++, s.letter());
    if (s.index() % 3 == 0) e.sources[SourceKind::kWikidata] = {"Q" + std::to_string(id), "label: x\nP31: Q43229", true};
    if (s.index() % 4 == 1) e.sources[SourceKind::kWikipedia] = {"en:X" + std::to_string(id), "", false};
    if (s.index() % 5 == 2) e.bbox = BBox{-0.1 - s.index() * 1e-7, 51.5, 0.1 / 3.0, 51.5 + 1.0 / 3.0};
    d.entries.push_back(std::move(e));
  }
  return d;
}

DatasetEntry heim_kieswerk() {
  DatasetEntry e;
  e.id = 122563530;
  e.type = ElementType::kWay;
  e.name = "Heim Kieswerk";
  e.bbox = BBox{12.4893727, 50.9761359, 12.5089029, 50.9916218};
  e.osm_tags = {{"addr:city", "Nobitz"},        {"addr:country", "DE"},  {"addr:housenumber", "14c"},
                {"addr:postcode", "04603"},     {"addr:street", "Altenburger Straße"},
                {"landuse", "quarry"},          {"resource", "sand"},
                {"operator", "Heim Kieswerk Nobitz GmbH & Co. KG"}};
  e.category = SectionCode::parse("B");
  e.image_paths = {{ImageKind::kOsm, "images/122563530_osm.png"},
                   {ImageKind::kSatellite, "images/122563530_satellite.png"}};
  e.sources[SourceKind::kWebsite] = {"https://www.heim-gruppe.de", "", false};
  return e;
}

std::vector<std::string> golden_prompt_names() {
  return {"zero_shot_simple_text", "zero_shot_extended_json", "clue_satellite", "clue_website",
          "decision_clues",        "decision_empty"};
}

std::string render_golden_prompt(const std::string& name) {
  auto e = heim_kieswerk();
  e.sources[SourceKind::kWebsite] = {"https://www.heim-gruppe.de", "Kies und Sand\nLieferung von Baustoffen", true};
  const PromptTemplate simple_text{PromptVariant::kSimple, OutputMode::kText};
  const PromptTemplate extended_json{PromptVariant::kExtended, OutputMode::kJson};
  std::vector<Message> m;
  if (name == "zero_shot_simple_text") {
    m = build_zero_shot_prompt(e, InputSelection::kAll, simple_text, taxonomy());
  } else if (name == "zero_shot_extended_json") {
    m = build_zero_shot_prompt(e, InputSelection::kAll, extended_json, taxonomy());
  } else if (name == "clue_satellite") {
    m = build_clue_prompt(ClueSource::kSatellite, clue_payload_for(e, ClueSource::kSatellite), taxonomy());
  } else if (name == "clue_website") {
    m = build_clue_prompt(ClueSource::kWebsite, clue_payload_for(e, ClueSource::kWebsite), taxonomy());
  } else if (name == "decision_clues") {
    const std::vector<ClueText> clues = {
        {ClueSource::kWebsite, "Economic activity clues:\n- [mining] gravel and sand extraction"},
        {ClueSource::kSatellite, "Economic activity clues:\n- [quarrying] open pit with exposed ground"},
        {ClueSource::kOsm, "No economic activity clues found."}};
    m = build_decision_prompt(e.name, clues, simple_text, taxonomy());
  } else if (name == "decision_empty") {
    m = build_decision_prompt(e.name, {}, extended_json, taxonomy());
  } else {
    throw std::invalid_argument("unknown golden " + name);
  }
  return render_messages(m);
}

std::string check_golden(const std::string& file, const std::string& actual) {
  const auto path = golden_path(file);
  if (std::getenv("GEONACE_UPDATE_GOLDENS")) {
    spit(path, actual);
    return "";
  }
  if (!fs::exists(path)) return path.string() + " missing";
  const auto expected = slurp(path);
  if (expected == actual) return "";
  std::size_t i = 0;
  while (i < expected.size() && i < actual.size() && expected[i] == actual[i]) ++i;
  return file + " differs at byte " + std::to_string(i);
}

}  // namespace geonace::testing
