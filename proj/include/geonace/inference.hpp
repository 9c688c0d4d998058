// Copyright 2026 The geonace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "geonace/dataset.hpp"
#include "geonace/taxonomy.hpp"
#include "geonace/types.hpp"

namespace geonace {

// Which resources accompany the entity name. The name is always supplied.
enum class InputSelection { kNone, kSatellite, kExternal, kSatelliteOsm, kSatelliteExternal, kAll };
std::string_view to_string(InputSelection selection);
std::optional<InputSelection> parse_input_selection(std::string_view text);

enum class PromptVariant { kSimple, kExtended };
enum class OutputMode { kText, kJson };
std::string_view to_string(PromptVariant variant);
std::string_view to_string(OutputMode mode);
std::optional<PromptVariant> parse_prompt_variant(std::string_view text);
std::optional<OutputMode> parse_output_mode(std::string_view text);

struct PromptTemplate {
  PromptVariant variant = PromptVariant::kSimple;
  OutputMode output_mode = OutputMode::kText;

  friend bool operator==(const PromptTemplate&, const PromptTemplate&) = default;
};

enum class Pipeline { kZeroShot, kMultiTurn };
std::string_view to_string(Pipeline pipeline);
std::optional<Pipeline> parse_pipeline(std::string_view text);

// A message part is either text or a reference to an image file; images are
// inlined as base64 only when a request goes on the wire.
struct MessagePart {
  enum class Type { kText, kImage };
  Type type = Type::kText;
  std::string text;
  std::string image_path;
  std::string media_type;

  static MessagePart text_part(std::string text) { return {Type::kText, std::move(text), {}, {}}; }
  static MessagePart image_part(std::string path, std::string media_type = "image/png") {
    return {Type::kImage, {}, std::move(path), std::move(media_type)};
  }
  friend bool operator==(const MessagePart&, const MessagePart&) = default;
};

struct Message {
  std::string role;
  std::vector<MessagePart> parts;

  friend bool operator==(const Message&, const Message&) = default;
};

// Human-readable rendering used for golden files and debugging.
std::string render_messages(std::span<const Message> messages);
// Canonical JSON form, with image parts as path references.
nlohmann::json messages_to_json(std::span<const Message> messages);

struct Prediction {
  enum class Kind { kSection, kUnknown, kViolation };
  Kind kind = Kind::kViolation;
  std::optional<SectionCode> section;
  std::optional<std::string> explanation;
  std::string raw;

  // "A".."U", "UNK" or "VIOLATION".
  std::string label() const;
  friend bool operator==(const Prediction&, const Prediction&) = default;
};

// Total over all byte strings; never throws.
Prediction parse_prediction(std::string_view raw, OutputMode mode) noexcept;

struct ClueText {
  ClueSource source = ClueSource::kOsm;
  std::string text;

  friend bool operator==(const ClueText&, const ClueText&) = default;
};

// Case-insensitive match of "no economic activity", covering both
// "No Economic Activity Found" and "No economic activity clues found.".
bool is_no_evidence(std::string_view clue_text);

// Resources of `entry` selected by `selection`, in ClueSource order. Throws
// kValidation naming the missing resource unless selection is kAll.
std::vector<ClueSource> selected_resources(const DatasetEntry& entry, InputSelection selection);

std::string nace_context(const Taxonomy& taxonomy, PromptVariant variant);
std::string output_instruction(OutputMode mode);

std::vector<Message> build_zero_shot_prompt(const DatasetEntry& entry, InputSelection selection,
                                            const PromptTemplate& tmpl, const Taxonomy& taxonomy);

// Payload for one clue agent: an image path for osm/satellite, text otherwise.
struct CluePayload {
  std::string image_path;
  std::string text;
};

std::vector<Message> build_clue_prompt(ClueSource source, const CluePayload& payload, const Taxonomy& taxonomy);
CluePayload clue_payload_for(const DatasetEntry& entry, ClueSource source);

// Clues are emitted in ClueSource order whatever order they arrive in.
std::vector<Message> build_decision_prompt(std::string_view entity_name, std::span<const ClueText> clues,
                                           const PromptTemplate& tmpl, const Taxonomy& taxonomy);

}  // namespace geonace
