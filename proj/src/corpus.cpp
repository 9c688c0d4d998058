// Copyright 2026 The geonace Authors
// SPDX-License-Identifier: Apache-2.0

#include "geonace/corpus.hpp"

#include <algorithm>
#include <random>
#include <tuple>

#include <nlohmann/json.hpp>

#include "strings.hpp"

namespace geonace {

std::string_view to_string(QualityTier tier) {
  switch (tier) {
    case QualityTier::kBronze: return "bronze";
    case QualityTier::kSilver: return "silver";
    case QualityTier::kGold: return "gold";
  }
  return "bronze";
}

namespace {

bool has_value(const std::map<std::string, std::string>& tags, const std::string& key) {
  const auto it = tags.find(key);
  return it != tags.end() && !str::trim(it->second).empty();
}

std::vector<OsmTag> activity_tags(const OsmElement& element, const TagMapping& mapping) {
  std::vector<OsmTag> out;
  for (const auto& [k, v] : element.tags) {
    OsmTag tag{k, v};
    if (mapping.is_activity_tag(tag)) out.push_back(std::move(tag));
  }
  return out;
}

}  // namespace

std::optional<QualityTier> tier_of(const OsmElement& element, const TagMapping& mapping) {
  if (!has_value(element.tags, "name")) return std::nullopt;
  if (activity_tags(element, mapping).empty()) return std::nullopt;

  const bool has_address = std::any_of(element.tags.begin(), element.tags.end(), [](const auto& kv) {
    return kv.first.starts_with("addr:") && !str::trim(kv.second).empty();
  });
  if (!has_address) return QualityTier::kBronze;

  for (const char* key : {"wikidata", "wikipedia", "website", "contact:website"}) {
    if (has_value(element.tags, key)) return QualityTier::kGold;
  }
  return QualityTier::kSilver;
}

TagFrequency::TagFrequency(std::span<const OsmElement> pool, const TagMapping& mapping) {
  for (const auto& e : pool) {
    for (auto& tag : activity_tags(e, mapping)) ++counts_[tag];
  }
}

std::size_t TagFrequency::count(const OsmTag& tag) const {
  const auto it = counts_.find(tag);
  return it == counts_.end() ? 0 : it->second;
}

std::optional<LabeledElement> label(const OsmElement& element, const TagMapping& mapping,
                                    const TagFrequency& frequency, Diagnostics* diagnostics) {
  auto candidates = activity_tags(element, mapping);
  if (candidates.empty()) return std::nullopt;

  std::sort(candidates.begin(), candidates.end(), [&](const OsmTag& a, const OsmTag& b) {
    return std::forward_as_tuple(frequency.count(a), a) < std::forward_as_tuple(frequency.count(b), b);
  });

  const auto chosen_sections = mapping.sections_for_tag(candidates.front());
  const SectionCode category = *chosen_sections.begin();

  if (diagnostics) {
    std::set<SectionCode> all;
    for (const auto& t : candidates) {
      const auto s = mapping.sections_for_tag(t);
      all.insert(s.begin(), s.end());
    }
    if (all.size() > 1) {
      std::string options;
      for (auto s : all) options += s.letter();
      diagnostics->warn("ambiguous_label", std::to_string(element.id),
                        "tags point at sections " + options + "; chose " + category.str() + " via " +
                            candidates.front().canonical());
    }
  }
  return LabeledElement{element, category, tier_of(element, mapping)};
}

std::vector<LabeledElement> label_pool(std::span<const OsmElement> pool, const TagMapping& mapping,
                                       Diagnostics* diagnostics) {
  const TagFrequency frequency(pool, mapping);
  std::vector<LabeledElement> out;
  for (const auto& e : pool) {
    if (auto l = label(e, mapping, frequency, diagnostics)) out.push_back(std::move(*l));
  }
  return out;
}

std::map<SectionCode, std::vector<LabeledElement>> shuffled_gold_candidates(std::span<const LabeledElement> pool,
                                                                            std::uint64_t seed) {
  std::map<SectionCode, std::vector<LabeledElement>> groups;
  for (const auto& l : pool) {
    if (l.tier != QualityTier::kGold || is_household_section(l.category)) continue;
    groups[l.category].push_back(l);
  }
  for (auto& [section, group] : groups) {
    std::sort(group.begin(), group.end(),
              [](const LabeledElement& a, const LabeledElement& b) { return a.element.id < b.element.id; });
    // One stream per section; hand-rolled Fisher-Yates over raw engine output.
    std::mt19937_64 rng(seed ^ (0x9E3779B97F4A7C15ULL * static_cast<std::uint64_t>(section.index() + 1)));
    for (std::size_t i = group.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(rng() % i);
      std::swap(group[i - 1], group[j]);
    }
  }
  return groups;
}

std::vector<LabeledElement> sample_balanced(std::span<const LabeledElement> pool, std::size_t per_section,
                                            std::uint64_t seed) {
  if (per_section == 0) return {};
  auto groups = shuffled_gold_candidates(pool, seed);
  std::vector<LabeledElement> out;
  for (auto section : all_sections()) {
    if (is_household_section(section)) continue;
    const auto it = groups.find(section);
    const std::size_t available = it == groups.end() ? 0 : it->second.size();
    if (available < per_section) {
      throw Error(ErrorCode::kValidation, "insufficient gold elements for section " + section.str() + ": " +
                                              std::to_string(available) + " available, " +
                                              std::to_string(per_section) + " required");
    }
    out.insert(out.end(), it->second.begin(), it->second.begin() + static_cast<std::ptrdiff_t>(per_section));
  }
  return out;
}

ResourceHistogram resource_histogram(std::span<const DatasetEntry> entries) {
  ResourceHistogram h;
  for (const auto& e : entries) {
    std::string key;
    for (auto kind : kSourceKinds) {
      if (!e.sources.contains(kind)) continue;
      if (!key.empty()) key += '+';
      key += to_string(kind);
    }
    if (key.empty()) {
      key = "none";
      h.flagged_ids.push_back(e.id);
    }
    ++h.counts[key];
  }
  return h;
}

// --- element stream --------------------------------------------------------

namespace {

std::optional<OsmElement> element_from_json(const nlohmann::json& j, Diagnostics& diagnostics,
                                            const std::string& where) {
  const auto skip = [&](const std::string& why) -> std::optional<OsmElement> {
    diagnostics.warn("bad_element", where, why);
    return std::nullopt;
  };
  if (!j.is_object()) return skip("record is not an object");
  if (!j.contains("id") || !j["id"].is_number_integer() || j["id"].get<std::int64_t>() < 0) {
    return skip("missing or negative id");
  }
  OsmElement e;
  e.id = j["id"].get<std::int64_t>();
  const auto type = j.contains("type") && j["type"].is_string()
                        ? parse_element_type(j["type"].get<std::string>())
                        : std::nullopt;
  if (!type) return skip("missing or unknown type");
  e.type = *type;

  if (j.contains("tags")) {
    if (!j["tags"].is_object()) return skip("tags must be an object");
    for (const auto& [k, v] : j["tags"].items()) {
      if (v.is_string()) e.tags[k] = v.get<std::string>();
    }
  }

  if (j.contains("bbox")) {
    const auto& b = j["bbox"];
    if (!b.is_array() || b.size() != 4 || !std::all_of(b.begin(), b.end(), [](const auto& x) { return x.is_number(); })) {
      return skip("bbox must be [min_lon, min_lat, max_lon, max_lat]");
    }
    e.bbox = {b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
  } else if (j.contains("bounds") && j["bounds"].is_object()) {
    const auto& b = j["bounds"];
    try {
      e.bbox = {b.at("minlon").get<double>(), b.at("minlat").get<double>(), b.at("maxlon").get<double>(),
                b.at("maxlat").get<double>()};
    } catch (const nlohmann::json::exception&) {
      return skip("bounds incomplete");
    }
  } else if (j.contains("lon") && j.contains("lat") && j["lon"].is_number() && j["lat"].is_number()) {
    e.bbox = {j["lon"].get<double>(), j["lat"].get<double>(), j["lon"].get<double>(), j["lat"].get<double>()};
  } else if (j.contains("center") && j["center"].is_object()) {
    const auto& c = j["center"];
    if (!c.contains("lon") || !c.contains("lat")) return skip("center incomplete");
    e.bbox = {c["lon"].get<double>(), c["lat"].get<double>(), c["lon"].get<double>(), c["lat"].get<double>()};
  } else {
    return skip("no geometry (bbox, bounds, or lon/lat)");
  }

  if (!e.bbox.valid()) return skip("bbox outside WGS84 range or inverted");
  if (e.bbox.degenerate()) {
    const double lon = (e.bbox.min_lon + e.bbox.max_lon) / 2;
    const double lat = (e.bbox.min_lat + e.bbox.max_lat) / 2;
    const BBox p = expand_point(lon, lat);
    // Expand only the collapsed axes of a line-like way.
    if (e.bbox.min_lon == e.bbox.max_lon) {
      e.bbox.min_lon = p.min_lon;
      e.bbox.max_lon = p.max_lon;
    }
    if (e.bbox.min_lat == e.bbox.max_lat) {
      e.bbox.min_lat = p.min_lat;
      e.bbox.max_lat = p.max_lat;
    }
  }
  return e;
}

}  // namespace

std::vector<OsmElement> parse_element_stream(std::string_view text, Diagnostics& diagnostics) {
  std::vector<OsmElement> out;
  const auto body = str::trim(text);
  if (body.empty()) return out;

  if (body.front() == '{') {
    const auto whole = nlohmann::json::parse(body, nullptr, false);
    if (!whole.is_discarded() && whole.is_object() && whole.contains("elements")) {
      int i = 0;
      for (const auto& el : whole["elements"]) {
        if (auto e = element_from_json(el, diagnostics, "elements[" + std::to_string(i++) + "]")) {
          out.push_back(std::move(*e));
        }
      }
      return out;
    }
  }

  int line_no = 0;
  for (auto line : str::split(text, '\n')) {
    ++line_no;
    line = str::trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      diagnostics.warn("bad_element", where, "not valid JSON");
      continue;
    }
    if (auto e = element_from_json(j, diagnostics, where)) out.push_back(std::move(*e));
  }
  return out;
}

std::vector<OsmElement> read_element_stream(const std::filesystem::path& path, Diagnostics& diagnostics) {
  return parse_element_stream(str::read_file(path.string()), diagnostics);
}

}  // namespace geonace
