// Copyright 2026 The geonace Authors
// SPDX-License-Identifier: Apache-2.0

#include "geonace/taxonomy.hpp"

#include <algorithm>
#include <sstream>

#include <nlohmann/json.hpp>

#include "geonace/error.hpp"
#include "strings.hpp"

namespace geonace {

std::optional<SectionCode> SectionCode::from_letter(char letter) {
  if (letter < 'A' || letter > 'U') return std::nullopt;
  return SectionCode(letter);
}

SectionCode SectionCode::parse(std::string_view text) {
  if (text.size() != 1) {
    throw Error(ErrorCode::kValidation, "section code must be one letter A..U, got '" +
                                            std::string(text) + "'");
  }
  auto code = from_letter(text[0]);
  if (!code) {
    throw Error(ErrorCode::kValidation, "section code out of range A..U: '" + std::string(text) + "'");
  }
  return *code;
}

SectionCode SectionCode::from_index(int index) {
  if (index < 0 || index >= kSectionCount) {
    throw Error(ErrorCode::kInvalidArgument, "section index out of range: " + std::to_string(index));
  }
  return SectionCode(static_cast<char>('A' + index));
}

const std::array<SectionCode, kSectionCount>& all_sections() {
  static const auto sections = [] {
    std::array<SectionCode, kSectionCount> out{
        SectionCode::from_index(0), SectionCode::from_index(1), SectionCode::from_index(2),
        SectionCode::from_index(3), SectionCode::from_index(4), SectionCode::from_index(5),
        SectionCode::from_index(6), SectionCode::from_index(7), SectionCode::from_index(8),
        SectionCode::from_index(9), SectionCode::from_index(10), SectionCode::from_index(11),
        SectionCode::from_index(12), SectionCode::from_index(13), SectionCode::from_index(14),
        SectionCode::from_index(15), SectionCode::from_index(16), SectionCode::from_index(17),
        SectionCode::from_index(18), SectionCode::from_index(19), SectionCode::from_index(20)};
    return out;
  }();
  return sections;
}

std::string normalize_keyword(std::string_view keyword) { return str::lower(str::trim(keyword)); }

bool is_valid_keyword(std::string_view keyword) {
  if (keyword.empty() || keyword.front() == '-' || keyword.back() == '-') return false;
  return std::all_of(keyword.begin(), keyword.end(),
                     [](char c) { return (c >= 'a' && c <= 'z') || c == '-'; });
}

Taxonomy Taxonomy::load(const std::filesystem::path& lexicon_file) {
  return parse(str::read_file(lexicon_file.string()), lexicon_file.string());
}

Taxonomy Taxonomy::parse(std::string_view text, std::string_view origin) {
  std::vector<std::optional<NaceSection>> slots(kSectionCount);
  std::unordered_map<std::string, SectionCode> index;
  int line_no = 0;
  const auto where = [&] { return std::string(origin) + ":" + std::to_string(line_no) + ": "; };

  for (auto raw : str::split(text, '\n')) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    if (str::trim(raw).empty() || str::trim(raw).front() == '#') continue;
    const auto fields = str::split(raw, '\t');
    if (fields.size() != 5) {
      throw Error(ErrorCode::kValidation,
                  where() + "expected 5 tab-separated fields, got " + std::to_string(fields.size()));
    }
    const SectionCode code = SectionCode::parse(str::trim(fields[0]));
    if (slots[code.index()]) {
      throw Error(ErrorCode::kValidation, where() + "section " + code.str() + " listed twice");
    }
    NaceSection section{code, std::string(str::trim(fields[2])), std::string(str::trim(fields[3])), {}, true};
    const auto osm = str::trim(fields[1]);
    if (osm == "yes") {
      section.obtainable_from_osm = true;
    } else if (osm == "no") {
      section.obtainable_from_osm = false;
    } else {
      throw Error(ErrorCode::kValidation, where() + "obtainable_from_osm must be yes or no");
    }
    if (section.obtainable_from_osm == is_household_section(code)) {
      throw Error(ErrorCode::kValidation,
                  where() + "only section T may be marked as not obtainable from OSM");
    }
    if (section.title.empty()) throw Error(ErrorCode::kValidation, where() + "empty title");
    for (auto kw_raw : str::split(fields[4], ',')) {
      const std::string kw = normalize_keyword(kw_raw);
      if (kw.empty()) continue;
      if (!is_valid_keyword(kw)) {
        throw Error(ErrorCode::kValidation, where() + "invalid keyword '" + kw + "'");
      }
      const auto [it, inserted] = index.emplace(kw, code);
      if (!inserted) {
        if (it->second == code) {
          throw Error(ErrorCode::kValidation, where() + "keyword '" + kw + "' repeated in section " + code.str());
        }
        throw Error(ErrorCode::kValidation, where() + "keyword '" + kw + "' appears in sections " +
                                                it->second.str() + " and " + code.str());
      }
      section.keywords.push_back(kw);
    }
    if (section.keywords.empty()) {
      throw Error(ErrorCode::kValidation, where() + "section " + code.str() + " has no keywords");
    }
    slots[code.index()] = std::move(section);
  }

  Taxonomy taxonomy;
  for (int i = 0; i < kSectionCount; ++i) {
    if (!slots[i]) {
      throw Error(ErrorCode::kValidation, std::string(origin) + ": missing section " +
                                              SectionCode::from_index(i).str());
    }
    taxonomy.sections_.push_back(std::move(*slots[i]));
  }
  taxonomy.keyword_index_ = std::move(index);
  return taxonomy;
}

std::optional<SectionCode> Taxonomy::section_for_keyword(std::string_view keyword) const {
  const auto it = keyword_index_.find(normalize_keyword(keyword));
  if (it == keyword_index_.end()) return std::nullopt;
  return it->second;
}

// --- tags ------------------------------------------------------------------

OsmTag parse_tag(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) {
    throw Error(ErrorCode::kParse, "bare key '" + std::string(str::trim(text)) + "': tag must be key=value");
  }
  OsmTag tag{std::string(str::trim(text.substr(0, eq))), std::string(str::trim(text.substr(eq + 1)))};
  if (tag.key.empty() || tag.value.empty() || tag.value.find('=') != std::string::npos) {
    throw Error(ErrorCode::kParse, "malformed tag '" + std::string(text) + "'");
  }
  return tag;
}

namespace {

// Minimal reader for a Python-style list literal of string elements.
class ListReader {
 public:
  explicit ListReader(std::string_view s) : s_(s) {}

  std::vector<std::string> read() {
    skip_ws();
    expect('[');
    std::vector<std::string> items;
    skip_ws();
    if (peek() == ']') {
      ++pos_;
    } else {
      while (true) {
        skip_ws();
        if (peek() == ']') {  // trailing comma
          ++pos_;
          break;
        }
        items.push_back(read_string());
        skip_ws();
        const char c = peek();
        ++pos_;
        if (c == ']') break;
        if (c != ',') fail("expected ',' or ']'");
      }
    }
    skip_ws();
    if (pos_ != s_.size()) fail("trailing text after list");
    return items;
  }

 private:
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }

  void skip_ws() {
    while (pos_ < s_.size() && std::string_view(" \t\r\n").find(s_[pos_]) != std::string_view::npos) ++pos_;
  }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string read_string() {
    const char quote = peek();
    if (quote != '"' && quote != '\'') fail("expected a quoted string");
    ++pos_;
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != quote) {
      if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) ++pos_;
      out.push_back(s_[pos_++]);
    }
    if (pos_ >= s_.size()) fail("unterminated string");
    ++pos_;
    return out;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::kParse, "tag list format error at offset " + std::to_string(pos_) + ": " + what);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<OsmTag> parse_llm_tag_list(std::string_view response) {
  const auto items = ListReader(response).read();
  std::vector<OsmTag> tags;
  std::set<OsmTag> seen;
  for (std::size_t i = 0; i < items.size(); ++i) {
    OsmTag tag;
    try {
      tag = parse_tag(items[i]);
    } catch (const Error& e) {
      throw Error(ErrorCode::kValidation, "element at index " + std::to_string(i) + ": " + e.what());
    }
    if (seen.insert(tag).second) tags.push_back(std::move(tag));
  }
  return tags;
}

// --- guideline extracts ----------------------------------------------------

GuidelineExtract parse_guideline_extract(std::string_view json_text) {
  const auto j = nlohmann::json::parse(json_text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw Error(ErrorCode::kParse, "guideline extract is not a JSON object");
  }
  const auto opt = [&](const char* key) -> std::optional<std::string> {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    if (!j[key].is_string()) throw Error(ErrorCode::kValidation, std::string("field ") + key + " must be a string");
    std::string v = j[key].get<std::string>();
    if (str::trim(v).empty()) return std::nullopt;
    return v;
  };
  GuidelineExtract e;
  e.official_name = opt("official_name").value_or("");
  if (e.official_name.empty()) throw Error(ErrorCode::kValidation, "guideline extract lacks official_name");
  e.alternative_name = opt("alternative_name");
  e.scope = opt("scope");
  e.content = opt("content");
  e.additional_content = opt("additional_content");
  e.exclusion = opt("exclusion");
  return e;
}

GuidelineExtract load_guideline_extract(const std::filesystem::path& path) {
  try {
    return parse_guideline_extract(str::read_file(path.string()));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string render_mapping_prompt(const GuidelineExtract& extract) {
  std::ostringstream out;
  out << "Task Description\n\n"
         "You will be given a description of a NACE code, representing a business activity.\n"
         "Your task is to identify relevant OpenStreetMap (OSM) tags that can be used to classify "
         "businesses or locations corresponding to this activity.\n\n"
         "NACE Code Description:\n";
  out << "Official Name: " << extract.official_name << '\n';
  const auto line = [&](const char* label, const std::optional<std::string>& v) {
    if (v) out << label << ": " << *v << '\n';
  };
  line("Alternative Name", extract.alternative_name);
  line("Scope", extract.scope);
  line("Content", extract.content);
  line("Additional Content", extract.additional_content);
  line("Exclusion", extract.exclusion);
  out << "\nResponse Format\n\n"
         "Your response must consist only of a Python list of OSM tags, where each element is a "
         "string in the form key=value.\n\n"
         "[\"landuse=retail\", \"shop=supermarket\", \"amenity=parking\"]\n\n"
         "Constraints\n"
         "- Every tag must include an = sign (e.g., shop=supermarket)\n"
         "- Do not include bare keys such as shop or amenity\n"
         "- Do not include explanations or additional text\n"
         "- Do not include Python code markers\n"
         "- Do not use tags unrelated to business activities (e.g., landuse=forest)\n"
         "- Output only the Python list\n\n"
         "OSM Tags:\n";
  return out.str();
}

// --- mapping ---------------------------------------------------------------

void TagMapping::add(const OsmTag& tag, SectionCode section) {
  if (is_household_section(section)) {
    throw Error(ErrorCode::kValidation, "tag " + tag.canonical() + " cannot target section T");
  }
  entries_[tag].insert(section);
}

std::set<SectionCode> TagMapping::sections_for_tag(const OsmTag& tag) const {
  const auto it = entries_.find(tag);
  if (it == entries_.end()) return {};
  return it->second;
}

TagMapping TagMapping::load(const std::filesystem::path& mapping_file) {
  return parse(str::read_file(mapping_file.string()), mapping_file.string());
}

TagMapping TagMapping::parse(std::string_view text, std::string_view origin) {
  TagMapping mapping;
  int line_no = 0;
  for (auto raw : str::split(text, '\n')) {
    ++line_no;
    if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
    if (str::trim(raw).empty() || str::trim(raw).front() == '#') continue;
    const std::string where = std::string(origin) + ":" + std::to_string(line_no) + ": ";
    const auto tab = raw.find('\t');
    if (tab == std::string_view::npos) {
      throw Error(ErrorCode::kValidation, where + "expected key=value<TAB>SECTIONS");
    }
    try {
      const OsmTag tag = parse_tag(raw.substr(0, tab));
      int targets = 0;
      for (auto s : str::split(raw.substr(tab + 1), ',')) {
        mapping.add(tag, SectionCode::parse(str::trim(s)));
        ++targets;
      }
      if (targets == 0) throw Error(ErrorCode::kValidation, "empty section set");
    } catch (const Error& e) {
      throw Error(ErrorCode::kValidation, where + e.what());
    }
  }
  return mapping;
}

std::string TagMapping::serialize() const {
  std::string out;
  for (const auto& [tag, sections] : entries_) {
    out += tag.canonical();
    out += '\t';
    bool first = true;
    for (auto s : sections) {
      if (!first) out += ',';
      out += s.letter();
      first = false;
    }
    out += '\n';
  }
  return out;
}

}  // namespace geonace
