// Copyright 2026 The geonace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <compare>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace geonace {

inline constexpr int kSectionCount = 21;

// One NACE Rev.2 top-level section letter, A..U. The alphabetical rank is
// the dimension index used by frequency vectors.
class SectionCode {
 public:
  static std::optional<SectionCode> from_letter(char letter);
  // Accepts exactly one uppercase letter A..U; throws kValidation otherwise.
  static SectionCode parse(std::string_view text);
  static SectionCode from_index(int index);

  char letter() const noexcept { return letter_; }
  int index() const noexcept { return letter_ - 'A'; }
  std::string str() const { return std::string(1, letter_); }

  friend auto operator<=>(SectionCode, SectionCode) = default;

 private:
  explicit constexpr SectionCode(char letter) : letter_(letter) {}
  char letter_;
};

const std::array<SectionCode, kSectionCount>& all_sections();
// Section T cannot be observed through OSM and is excluded from benchmarks.
inline bool is_household_section(SectionCode code) { return code.letter() == 'T'; }

struct NaceSection {
  SectionCode code;
  std::string title;
  std::string description;
  std::vector<std::string> keywords;
  bool obtainable_from_osm = true;
};

std::string normalize_keyword(std::string_view keyword);
bool is_valid_keyword(std::string_view keyword);

// The 21-section taxonomy with its keyword lexicon. Immutable after load.
class Taxonomy {
 public:
  static Taxonomy load(const std::filesystem::path& lexicon_file);
  static Taxonomy parse(std::string_view text, std::string_view origin = "<memory>");

  const std::vector<NaceSection>& sections() const noexcept { return sections_; }
  const NaceSection& section(SectionCode code) const { return sections_[code.index()]; }

  // Case-insensitive; absent for unknown tokens.
  std::optional<SectionCode> section_for_keyword(std::string_view keyword) const;

 private:
  std::vector<NaceSection> sections_;
  std::unordered_map<std::string, SectionCode> keyword_index_;
};

struct OsmTag {
  std::string key;
  std::string value;

  std::string canonical() const { return key + "=" + value; }
  friend auto operator<=>(const OsmTag&, const OsmTag&) = default;
};

// Splits on the first '='. Throws kParse with "bare key" when there is no
// '=', or "malformed tag" when either half is empty after trimming.
OsmTag parse_tag(std::string_view text);

// Parses a bracketed list of quoted strings as emitted by the mapping prompt.
// Order is preserved and duplicates are dropped, keeping the first.
std::vector<OsmTag> parse_llm_tag_list(std::string_view response);

// Flattened fields of an official guideline record for one section.
struct GuidelineExtract {
  std::string official_name;
  std::optional<std::string> alternative_name;
  std::optional<std::string> scope;
  std::optional<std::string> content;
  std::optional<std::string> additional_content;
  std::optional<std::string> exclusion;
};

GuidelineExtract parse_guideline_extract(std::string_view json_text);
GuidelineExtract load_guideline_extract(const std::filesystem::path& path);

std::string render_mapping_prompt(const GuidelineExtract& extract);

// Activity tag -> NACE sections. Never targets section T.
class TagMapping {
 public:
  static TagMapping load(const std::filesystem::path& mapping_file);
  static TagMapping parse(std::string_view text, std::string_view origin = "<memory>");

  void add(const OsmTag& tag, SectionCode section);
  std::set<SectionCode> sections_for_tag(const OsmTag& tag) const;
  bool is_activity_tag(const OsmTag& tag) const { return entries_.contains(tag); }
  const std::map<OsmTag, std::set<SectionCode>>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }

  // "key=value<TAB>A,B" lines in tag order.
  std::string serialize() const;

 private:
  std::map<OsmTag, std::set<SectionCode>> entries_;
};

}  // namespace geonace
