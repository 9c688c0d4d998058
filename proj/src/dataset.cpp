// Copyright 2026 The geonace Authors
// SPDX-License-Identifier: Apache-2.0

#include "geonace/dataset.hpp"

#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "geonace/corpus.hpp"
#include "geonace/error.hpp"
#include "strings.hpp"

namespace geonace {

using nlohmann::json;

const DatasetEntry* Dataset::find(std::int64_t id) const {
  for (const auto& e : entries) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

namespace {

[[noreturn]] void entry_error(std::int64_t id, const std::string& field, const std::string& what) {
  throw Error(ErrorCode::kValidation, "entry " + std::to_string(id) + ": field '" + field + "': " + what);
}

std::string dump(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

}  // namespace

void validate_entry(const DatasetEntry& e) {
  if (e.id < 0) entry_error(e.id, "id", "must be non-negative");
  if (str::trim(e.name).empty()) entry_error(e.id, "name", "must be non-empty");
  if (!e.bbox.valid()) entry_error(e.id, "bbox", "outside WGS84 range or inverted");
  if (is_household_section(e.category)) entry_error(e.id, "category", "section T is not a valid benchmark label");
  for (auto kind : {ImageKind::kOsm, ImageKind::kSatellite}) {
    const auto it = e.image_paths.find(kind);
    if (it == e.image_paths.end() || it->second.empty()) {
      entry_error(e.id, "image_paths", std::string("missing ") + std::string(to_string(kind)) + " image");
    }
  }
  if (e.sources.empty()) entry_error(e.id, "sources", "at least one external source is required");
  for (const auto& [kind, src] : e.sources) {
    if (src.locator.empty() && src.text.empty()) {
      entry_error(e.id, "sources", std::string(to_string(kind)) + " has neither text nor locator");
    }
    if (src.text_available && src.text.empty()) {
      entry_error(e.id, "sources", std::string(to_string(kind)) + " claims text but text is empty");
    }
  }
}

std::optional<std::string> find_label_leak(const DatasetEntry& e) {
  static const std::regex kNace(R"((^|[^A-Za-z])NACE([^A-Za-z]|$))", std::regex::icase);
  const std::regex section_ref(std::string(R"((^|[^A-Za-z])[Ss][Ee][Cc][Tt][Ii][Oo][Nn]\s+)") +
                               e.category.letter() + R"(([^A-Za-z0-9]|$))");
  for (const auto& [kind, src] : e.sources) {
    if (std::regex_search(src.text, kNace)) {
      return std::string(to_string(kind)) + " text mentions NACE";
    }
    if (std::regex_search(src.text, section_ref)) {
      return std::string(to_string(kind)) + " text names section " + e.category.str();
    }
  }
  return std::nullopt;
}

json entry_to_json(const DatasetEntry& e) {
  json tags = json::object();
  for (const auto& [k, v] : e.osm_tags) tags[k] = v;
  json images = json::object();
  for (const auto& [kind, path] : e.image_paths) images[std::string(to_string(kind))] = path;
  json sources = json::object();
  for (const auto& [kind, src] : e.sources) {
    sources[std::string(to_string(kind))] = {
        {"locator", src.locator}, {"text", src.text}, {"text_available", src.text_available}};
  }
  return json{{"schema_version", kDatasetSchemaVersion},
              {"id", e.id},
              {"type", std::string(to_string(e.type))},
              {"name", e.name},
              {"bbox", {e.bbox.min_lon, e.bbox.min_lat, e.bbox.max_lon, e.bbox.max_lat}},
              {"osm_tags", tags},
              {"category", e.category.str()},
              {"image_paths", images},
              {"sources", sources}};
}

DatasetEntry entry_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kValidation, "entry record is not an object");
  DatasetEntry e;
  if (!j.contains("id") || !j["id"].is_number_integer()) {
    throw Error(ErrorCode::kValidation, "entry record: field 'id' missing or not an integer");
  }
  e.id = j["id"].get<std::int64_t>();

  const auto field = [&](const char* name) -> const json& {
    if (!j.contains(name)) entry_error(e.id, name, "missing");
    return j[name];
  };
  const auto string_field = [&](const char* name) {
    const auto& v = field(name);
    if (!v.is_string()) entry_error(e.id, name, "must be a string");
    return v.get<std::string>();
  };

  if (j.contains("schema_version") && j["schema_version"] != kDatasetSchemaVersion) {
    entry_error(e.id, "schema_version", "unsupported version " + j["schema_version"].dump());
  }
  const auto type = parse_element_type(string_field("type"));
  if (!type) entry_error(e.id, "type", "must be node, way or relation");
  e.type = *type;
  e.name = string_field("name");

  const auto& bbox = field("bbox");
  if (!bbox.is_array() || bbox.size() != 4) entry_error(e.id, "bbox", "must be a 4-element array");
  for (const auto& x : bbox) {
    if (!x.is_number()) entry_error(e.id, "bbox", "must contain numbers");
  }
  e.bbox = {bbox[0].get<double>(), bbox[1].get<double>(), bbox[2].get<double>(), bbox[3].get<double>()};

  const auto& tags = field("osm_tags");
  if (!tags.is_object()) entry_error(e.id, "osm_tags", "must be an object");
  for (const auto& [k, v] : tags.items()) {
    if (!v.is_string()) entry_error(e.id, "osm_tags", "value of '" + k + "' must be a string");
    e.osm_tags[k] = v.get<std::string>();
  }

  try {
    e.category = SectionCode::parse(string_field("category"));
  } catch (const Error& err) {
    entry_error(e.id, "category", err.what());
  }

  const auto& images = field("image_paths");
  if (!images.is_object()) entry_error(e.id, "image_paths", "must be an object");
  for (const auto& [k, v] : images.items()) {
    if (!v.is_string()) entry_error(e.id, "image_paths", "path must be a string");
    if (k == "osm") {
      e.image_paths[ImageKind::kOsm] = v.get<std::string>();
    } else if (k == "satellite") {
      e.image_paths[ImageKind::kSatellite] = v.get<std::string>();
    } else {
      entry_error(e.id, "image_paths", "unknown image kind '" + k + "'");
    }
  }

  const auto& sources = field("sources");
  if (!sources.is_object()) entry_error(e.id, "sources", "must be an object");
  for (const auto& [k, v] : sources.items()) {
    const auto kind = parse_source_kind(k);
    if (!kind) entry_error(e.id, "sources", "unknown source kind '" + k + "'");
    if (!v.is_object()) entry_error(e.id, "sources", k + " must be an object");
    SourceEntry src;
    src.locator = v.value("locator", "");
    src.text = v.value("text", "");
    src.text_available = v.value("text_available", !src.text.empty());
    e.sources[*kind] = std::move(src);
  }

  validate_entry(e);
  return e;
}

namespace {

json manifest_to_json(const DatasetManifest& m, std::size_t entry_count) {
  return json{{"schema_version", kDatasetSchemaVersion},
              {"name", m.name},
              {"version", m.version},
              {"created_at", m.created_at},
              {"attributions", m.attributions},
              {"entry_count", entry_count},
              {"run", m.run}};
}

}  // namespace

void write_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
  std::set<std::int64_t> ids;
  for (const auto& e : dataset.entries) {
    validate_entry(e);
    if (auto leak = find_label_leak(e)) {
      throw Error(ErrorCode::kLeak, "entry " + std::to_string(e.id) + ": " + *leak);
    }
    if (!ids.insert(e.id).second) entry_error(e.id, "id", "duplicate id");
  }

  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());

  std::string body;
  for (const auto& e : dataset.entries) {
    body += dump(entry_to_json(e));
    body += '\n';
  }
  str::write_file((dir / kEntriesFile).string(), body);
  str::write_file((dir / kManifestFile).string(), manifest_to_json(dataset.manifest, dataset.entries.size()).dump(2) + "\n");
}

Dataset read_dataset(const std::filesystem::path& dir) {
  Dataset d;
  const auto manifest = json::parse(str::read_file((dir / kManifestFile).string()), nullptr, false);
  if (manifest.is_discarded() || !manifest.is_object()) {
    throw Error(ErrorCode::kParse, (dir / kManifestFile).string() + ": not a JSON object");
  }
  if (manifest.value("schema_version", 0) != kDatasetSchemaVersion) {
    throw Error(ErrorCode::kValidation, (dir / kManifestFile).string() + ": unsupported schema_version");
  }
  d.manifest.name = manifest.value("name", "");
  d.manifest.version = manifest.value("version", "");
  d.manifest.created_at = manifest.value("created_at", "");
  d.manifest.attributions = manifest.value("attributions", std::vector<std::string>{});
  d.manifest.run = manifest.value("run", json::object());

  const std::string path = (dir / kEntriesFile).string();
  std::set<std::int64_t> ids;
  const std::string body = str::read_file(path);
  int line_no = 0;
  for (auto line : str::split(body, '\n')) {
    ++line_no;
    if (str::trim(line).empty()) continue;
    const auto j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      throw Error(ErrorCode::kParse, path + ":" + std::to_string(line_no) + ": not valid JSON");
    }
    DatasetEntry e = entry_from_json(j);
    if (auto leak = find_label_leak(e)) {
      throw Error(ErrorCode::kLeak, "entry " + std::to_string(e.id) + ": " + *leak);
    }
    if (!ids.insert(e.id).second) entry_error(e.id, "id", "duplicate id");
    d.entries.push_back(std::move(e));
  }
  return d;
}

DatasetSummary summarize(const Dataset& dataset) {
  DatasetSummary s;
  s.total = dataset.entries.size();
  std::array<std::array<std::size_t, kClueSourceCount>, kSectionCount> sums{};
  for (const auto& e : dataset.entries) {
    const int row = e.category.index();
    ++s.per_section[row];
    if (e.image_paths.contains(ImageKind::kOsm)) ++sums[row][index_of(ClueSource::kOsm)];
    if (e.image_paths.contains(ImageKind::kSatellite)) ++sums[row][index_of(ClueSource::kSatellite)];
    for (const auto& [kind, src] : e.sources) ++sums[row][index_of(clue_source_for(kind))];
  }
  for (int r = 0; r < kSectionCount; ++r) {
    for (int c = 0; c < kClueSourceCount; ++c) {
      s.mean_resources[r][c] =
          s.per_section[r] == 0 ? 0.0 : static_cast<double>(sums[r][c]) / static_cast<double>(s.per_section[r]);
    }
  }
  s.histogram = resource_histogram(dataset.entries);
  return s;
}

json summary_to_json(const DatasetSummary& s) {
  json sections = json::object();
  for (auto code : all_sections()) {
    json means = json::object();
    for (auto src : kClueSources) means[std::string(to_string(src))] = s.mean_resources[code.index()][index_of(src)];
    sections[code.str()] = {{"entries", s.per_section[code.index()]}, {"mean_resources", means}};
  }
  return json{{"total", s.total},
              {"sections", sections},
              {"source_combinations", s.histogram.counts},
              {"entries_without_sources", s.histogram.flagged_ids}};
}

std::string render_summary(const DatasetSummary& s) {
  std::string out = fmt::format("entries: {}\n\n{:<8}{:>8}{:>8}{:>10}{:>10}{:>10}{:>10}\n", s.total, "section",
                                "count", "osm", "satellite", "wikidata", "wikipedia", "website");
  for (auto code : all_sections()) {
    const auto& m = s.mean_resources[code.index()];
    out += fmt::format("{:<8}{:>8}{:>8.2f}{:>10.2f}{:>10.2f}{:>10.2f}{:>10.2f}\n", code.str(),
                       s.per_section[code.index()], m[0], m[1], m[2], m[3], m[4]);
  }
  out += "\nsource combinations:\n";
  for (const auto& [key, n] : s.histogram.counts) out += fmt::format("  {:<28}{:>8}\n", key, n);
  if (!s.histogram.flagged_ids.empty()) {
    out += fmt::format("warning: {} entries have no external source\n", s.histogram.flagged_ids.size());
  }
  return out;
}

}  // namespace geonace
