// Copyright 2026 The geonace Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <sstream>

#include "geonace/error.hpp"
#include "geonace/inference.hpp"
#include "strings.hpp"

namespace geonace {

std::string_view to_string(InputSelection s) {
  switch (s) {
    case InputSelection::kNone: return "none";
    case InputSelection::kSatellite: return "satellite";
    case InputSelection::kExternal: return "external";
    case InputSelection::kSatelliteOsm: return "satellite_osm";
    case InputSelection::kSatelliteExternal: return "satellite_external";
    case InputSelection::kAll: return "all";
  }
  return "none";
}

std::optional<InputSelection> parse_input_selection(std::string_view text) {
  for (auto s : {InputSelection::kNone, InputSelection::kSatellite, InputSelection::kExternal,
                 InputSelection::kSatelliteOsm, InputSelection::kSatelliteExternal, InputSelection::kAll}) {
    if (to_string(s) == text) return s;
  }
  return std::nullopt;
}

std::string_view to_string(PromptVariant v) { return v == PromptVariant::kSimple ? "simple" : "extended"; }
std::string_view to_string(OutputMode m) { return m == OutputMode::kText ? "text" : "json"; }
std::string_view to_string(Pipeline p) { return p == Pipeline::kZeroShot ? "zero_shot" : "multi_turn"; }

std::optional<PromptVariant> parse_prompt_variant(std::string_view t) {
  if (t == "simple") return PromptVariant::kSimple;
  if (t == "extended") return PromptVariant::kExtended;
  return std::nullopt;
}

std::optional<OutputMode> parse_output_mode(std::string_view t) {
  if (t == "text") return OutputMode::kText;
  if (t == "json") return OutputMode::kJson;
  return std::nullopt;
}

std::optional<Pipeline> parse_pipeline(std::string_view t) {
  if (t == "zero_shot" || t == "zero-shot") return Pipeline::kZeroShot;
  if (t == "multi_turn" || t == "multi-turn") return Pipeline::kMultiTurn;
  return std::nullopt;
}

std::string render_messages(std::span<const Message> messages) {
  std::string out;
  for (const auto& m : messages) {
    out += "=== " + m.role + " ===\n";
    for (const auto& p : m.parts) {
      if (p.type == MessagePart::Type::kText) {
        out += p.text;
        if (out.back() != '\n') out += '\n';
      } else {
        out += "<image " + p.media_type + " " + p.image_path + ">\n";
      }
    }
  }
  return out;
}

nlohmann::json messages_to_json(std::span<const Message> messages) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& m : messages) {
    nlohmann::json parts = nlohmann::json::array();
    for (const auto& p : m.parts) {
      if (p.type == MessagePart::Type::kText) {
        parts.push_back({{"type", "text"}, {"text", p.text}});
      } else {
        parts.push_back({{"type", "image"}, {"path", p.image_path}, {"media_type", p.media_type}});
      }
    }
    out.push_back({{"role", m.role}, {"content", parts}});
  }
  return out;
}

// --- predictions -----------------------------------------------------------

std::string Prediction::label() const {
  switch (kind) {
    case Kind::kSection: return section ? section->str() : "VIOLATION";
    case Kind::kUnknown: return "UNK";
    case Kind::kViolation: return "VIOLATION";
  }
  return "VIOLATION";
}

namespace {

Prediction parse_label_text(std::string_view raw_label) {
  Prediction p;
  const std::string token = str::upper(str::trim(raw_label));
  if (token == "UNK") {
    p.kind = Prediction::Kind::kUnknown;
  } else if (token.size() == 1 && SectionCode::from_letter(token[0])) {
    p.kind = Prediction::Kind::kSection;
    p.section = SectionCode::from_letter(token[0]);
  }
  return p;
}

// End index of the balanced object starting at s[start] == '{', if any.
std::optional<std::size_t> object_end(std::string_view s, std::size_t start) {
  int depth = 0;
  bool in_string = false;
  for (std::size_t i = start; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return i;
    }
  }
  return std::nullopt;
}

Prediction parse_json_prediction(std::string_view raw) {
  for (std::size_t pos = raw.find('{'); pos != std::string_view::npos; pos = raw.find('{', pos + 1)) {
    const auto end = object_end(raw, pos);
    if (!end) continue;
    const auto j = nlohmann::json::parse(raw.substr(pos, *end - pos + 1), nullptr, false);
    if (j.is_discarded() || !j.is_object()) continue;
    // First well-formed object decides.
    if (!j.contains("EXPLANATION") || !j.contains("LLM_RESPONSE") || !j["EXPLANATION"].is_string() ||
        !j["LLM_RESPONSE"].is_string()) {
      return Prediction{};
    }
    Prediction p = parse_label_text(j["LLM_RESPONSE"].get<std::string>());
    if (p.kind != Prediction::Kind::kViolation) p.explanation = j["EXPLANATION"].get<std::string>();
    return p;
  }
  return Prediction{};
}

}  // namespace

Prediction parse_prediction(std::string_view raw, OutputMode mode) noexcept {
  try {
    Prediction p = mode == OutputMode::kText ? parse_label_text(raw) : parse_json_prediction(raw);
    p.raw = std::string(raw);
    return p;
  } catch (...) {
    Prediction p;
    try {
      p.raw = std::string(raw);
    } catch (...) {
    }
    return p;
  }
}

bool is_no_evidence(std::string_view clue_text) { return str::icontains(clue_text, "no economic activity"); }

// --- resource selection ----------------------------------------------------

namespace {

bool has_image(const DatasetEntry& e, ImageKind kind) {
  const auto it = e.image_paths.find(kind);
  return it != e.image_paths.end() && !it->second.empty();
}

bool has_text(const DatasetEntry& e, SourceKind kind) {
  const auto it = e.sources.find(kind);
  return it != e.sources.end() && it->second.text_available && !it->second.text.empty();
}

[[noreturn]] void missing(const DatasetEntry& e, InputSelection s, const std::string& what) {
  throw Error(ErrorCode::kValidation, "entry " + std::to_string(e.id) + ": input configuration " +
                                          std::string(to_string(s)) + " needs " + what);
}

}  // namespace

std::vector<ClueSource> selected_resources(const DatasetEntry& e, InputSelection s) {
  std::vector<ClueSource> out;
  const bool want_osm = s == InputSelection::kSatelliteOsm || s == InputSelection::kAll;
  const bool want_sat = s == InputSelection::kSatellite || s == InputSelection::kSatelliteOsm ||
                        s == InputSelection::kSatelliteExternal || s == InputSelection::kAll;
  const bool want_text = s == InputSelection::kExternal || s == InputSelection::kSatelliteExternal ||
                         s == InputSelection::kAll;
  const bool strict = s != InputSelection::kAll;

  if (want_osm) {
    if (has_image(e, ImageKind::kOsm)) {
      out.push_back(ClueSource::kOsm);
    } else if (strict) {
      missing(e, s, "an OSM image");
    }
  }
  if (want_sat) {
    if (has_image(e, ImageKind::kSatellite)) {
      out.push_back(ClueSource::kSatellite);
    } else if (strict) {
      missing(e, s, "a satellite image");
    }
  }
  if (want_text) {
    bool any = false;
    for (auto kind : kSourceKinds) {
      if (has_text(e, kind)) {
        out.push_back(clue_source_for(kind));
        any = true;
      }
    }
    if (!any && strict) missing(e, s, "at least one external text source");
  }
  return out;
}

// --- prompt text -----------------------------------------------------------

std::string nace_context(const Taxonomy& taxonomy, PromptVariant variant) {
  std::string out = variant == PromptVariant::kSimple ? "NACE Rev.2 sections (code: title):\n"
                                                      : "NACE Rev.2 sections (code: title, followed by a summary):\n";
  for (const auto& s : taxonomy.sections()) {
    out += s.code.str() + ": " + s.title + "\n";
    if (variant == PromptVariant::kExtended) out += "   " + s.description + "\n";
  }
  return out;
}

std::string output_instruction(OutputMode mode) {
  if (mode == OutputMode::kText) {
    return "You will return only the SECTOR CODE.\n"
           "If you are not sure about the sector code,\n"
           "return \"UNK\" as a default value.\n"
           "Example\n"
           "A\n"
           "SINGLE TOKEN RESPONSE ONLY\n";
  }
  return "You will return a JSON output including the Sector and Explanation.\n"
         "Explanation should be a short description, less than 50 words,\n"
         "of why you chose this sector code.\n"
         "{\n"
         "  \"EXPLANATION\": \"This belongs to Category A because ...\",\n"
         "  \"LLM_RESPONSE\": \"A\"\n"
         "}\n"
         "DO NOT PRINT ANYTHING OTHER THAN JSON RESPONSE\n";
}

namespace {

std::string zero_shot_system(const Taxonomy& taxonomy, const PromptTemplate& tmpl) {
  return "Role\n"
         "You are an assistant designed to identify economic activities from heterogeneous geospatial and "
         "textual resources.\n\n"
         "Inputs\n"
         "- Images: OpenStreetMap (OSM), Satellite imagery\n"
         "- Textual: Wikidata, Wikipedia, Website\n"
         "- Entity name\n\n"
         "Visual Analysis (Images)\n"
         "Identify relevant geospatial features, including but not limited to:\n"
         "- Buildings\n"
         "- Terrain\n"
         "- Streets\n\n"
         "Contextual Analysis (Text)\n"
         "Extract economic context such as:\n"
         "- Products and services\n"
         "- Activities\n"
         "- Business type\n"
         "- Industry\n\n"
         "Task\n"
         "Based on the extracted attributes and the entity name, predict the corresponding NACE Rev.2 "
         "economic activity sector code.\n\n" +
         nace_context(taxonomy, tmpl.variant) +
         "\nAvailable Resources\n"
         "- osm: OSM image\n"
         "- satellite: Satellite image\n"
         "- source: Wikidata / Wikipedia / Website\n\n"
         "If no external resources are provided, rely solely on the entity name.\n\n"
         "Output Format\n" +
         output_instruction(tmpl.output_mode);
}

std::string decision_system(const Taxonomy& taxonomy, const PromptTemplate& tmpl) {
  return "Role\n"
         "You are an assistant designed to identify economic activities from multiple, incremental "
         "information sources.\n\n"
         "Inputs\n"
         "You may be provided with clues from the following sources:\n"
         "Wikidata, Wikipedia, Websites, OpenStreetMap (OSM) images, Satellite images\n\n"
         "Task\n"
         "Based on the provided clues and the entity name, identify the corresponding NACE economic "
         "activity sector code.\n\n" +
         nace_context(taxonomy, tmpl.variant) +
         "\nNote that you may not be given all of the clues.\n"
         "If no clues are provided, rely solely on the entity name.\n\n"
         "Output Format\n" +
         output_instruction(tmpl.output_mode);
}

std::string clue_system(const Taxonomy& taxonomy) {
  std::string out =
      "You are an agent tasked with extracting explicit economic activity clues from a single information "
      "source.\n\n"
      "General Rules\n"
      "- Only extract activities with direct textual or visual evidence.\n"
      "- The provided keyword list defines all valid economic activity categories.\n"
      "- Match only exact keywords or clear synonyms.\n"
      "- Do not infer, guess, or generalize beyond the source.\n"
      "- When mentioning an activity, wrap it in [ ] exactly as in the keyword list.\n"
      "- For every activity, cite the exact supporting feature, tag, phrase, or entity.\n"
      "- If no activity is present, output exactly: \"No economic activity clues found.\"\n"
      "- Output language must be English.\n"
      "- Maximum output length: 512 tokens.\n\n"
      "Keyword list\n";
  for (const auto& s : taxonomy.sections()) {
    out += s.code.str() + " (" + s.title + "):";
    for (std::size_t i = 0; i < s.keywords.size(); ++i) out += (i ? ", [" : " [") + s.keywords[i] + "]";
    out += "\n";
  }
  out +=
      "\nOutput Format\n\n"
      "Economic activity clues:\n"
      "- [keyword] supporting evidence from the source\n";
  return out;
}

std::string source_heading(ClueSource s) {
  switch (s) {
    case ClueSource::kOsm: return "OSM image";
    case ClueSource::kSatellite: return "Satellite image";
    case ClueSource::kWikidata: return "Wikidata";
    case ClueSource::kWikipedia: return "Wikipedia";
    case ClueSource::kWebsite: return "Website";
  }
  return "";
}

bool is_image_source(ClueSource s) { return s == ClueSource::kOsm || s == ClueSource::kSatellite; }

SourceKind text_kind(ClueSource s) {
  switch (s) {
    case ClueSource::kWikidata: return SourceKind::kWikidata;
    case ClueSource::kWikipedia: return SourceKind::kWikipedia;
    default: return SourceKind::kWebsite;
  }
}

}  // namespace

CluePayload clue_payload_for(const DatasetEntry& entry, ClueSource source) {
  CluePayload p;
  if (is_image_source(source)) {
    const auto kind = source == ClueSource::kOsm ? ImageKind::kOsm : ImageKind::kSatellite;
    const auto it = entry.image_paths.find(kind);
    if (it != entry.image_paths.end()) p.image_path = it->second;
  } else {
    const auto it = entry.sources.find(text_kind(source));
    if (it != entry.sources.end()) p.text = it->second.text;
  }
  return p;
}

std::vector<Message> build_zero_shot_prompt(const DatasetEntry& entry, InputSelection selection,
                                            const PromptTemplate& tmpl, const Taxonomy& taxonomy) {
  Message user{"user", {MessagePart::text_part("Entity name: " + entry.name)}};
  for (auto source : selected_resources(entry, selection)) {
    const auto payload = clue_payload_for(entry, source);
    if (is_image_source(source)) {
      user.parts.push_back(MessagePart::text_part(std::string(to_string(source)) + ": " + source_heading(source)));
      user.parts.push_back(MessagePart::image_part(payload.image_path));
    } else {
      user.parts.push_back(
          MessagePart::text_part("source (" + std::string(to_string(source)) + "):\n" + payload.text));
    }
  }
  return {Message{"system", {MessagePart::text_part(zero_shot_system(taxonomy, tmpl))}}, std::move(user)};
}

std::vector<Message> build_clue_prompt(ClueSource source, const CluePayload& payload, const Taxonomy& taxonomy) {
  Message user{"user", {}};
  if (is_image_source(source)) {
    if (payload.image_path.empty()) {
      throw Error(ErrorCode::kValidation, std::string(to_string(source)) + " clue agent needs an image");
    }
    user.parts.push_back(MessagePart::text_part("Source: " + source_heading(source)));
    user.parts.push_back(MessagePart::image_part(payload.image_path));
  } else {
    if (str::trim(payload.text).empty()) {
      throw Error(ErrorCode::kValidation, std::string(to_string(source)) + " clue agent needs non-empty text");
    }
    user.parts.push_back(MessagePart::text_part("Source: " + source_heading(source) + "\n\n" + payload.text));
  }
  return {Message{"system", {MessagePart::text_part(clue_system(taxonomy))}}, std::move(user)};
}

std::vector<Message> build_decision_prompt(std::string_view entity_name, std::span<const ClueText> clues,
                                           const PromptTemplate& tmpl, const Taxonomy& taxonomy) {
  std::vector<ClueText> ordered(clues.begin(), clues.end());
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const ClueText& a, const ClueText& b) { return index_of(a.source) < index_of(b.source); });
  std::string body = "Entity name: " + std::string(entity_name) + "\n";
  if (ordered.empty()) {
    body += "\nNo clues are provided.\n";
  } else {
    for (const auto& c : ordered) body += "\n### Clues from " + source_heading(c.source) + "\n" + c.text + "\n";
  }
  return {Message{"system", {MessagePart::text_part(decision_system(taxonomy, tmpl))}},
          Message{"user", {MessagePart::text_part(body)}}};
}

}  // namespace geonace
