// Copyright 2026 The geonace Authors
// SPDX-License-Identifier: Apache-2.0

#include "geonace/sources.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <ctime>
#include <set>

#include "strings.hpp"

namespace geonace {

bool is_wikidata_id(std::string_view s) {
  return s.size() >= 2 && s[0] == 'Q' && s[1] != '0' &&
         std::all_of(s.begin() + 1, s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool is_http_url(std::string_view s) {
  for (std::string_view scheme : {"http://", "https://"}) {
    if (str::istarts_with(s, scheme) && s.size() > scheme.size() &&
        s.find_first_of(" \t\r\n") == std::string_view::npos) {
      const auto host = s.substr(scheme.size());
      return !host.empty() && host[0] != '/';
    }
  }
  return false;
}

namespace {

bool is_wikipedia_locator(std::string_view s) {
  const auto colon = s.find(':');
  if (colon == std::string_view::npos || colon < 2 || colon > 12 || colon + 1 >= s.size()) return false;
  return std::all_of(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(colon),
                     [](char c) { return (c >= 'a' && c <= 'z') || c == '-'; });
}

}  // namespace

std::vector<SourceRef> refs_from_tags(const std::map<std::string, std::string>& tags, Diagnostics* diagnostics,
                                      const std::string& subject) {
  std::vector<SourceRef> refs;
  const auto skip = [&](const std::string& key, const std::string& value) {
    if (diagnostics) diagnostics->warn("malformed_locator", subject, key + "=" + value + " skipped");
  };
  const auto value_of = [&](const char* key) -> std::optional<std::string> {
    const auto it = tags.find(key);
    if (it == tags.end()) return std::nullopt;
    return std::string(str::trim(it->second));
  };

  if (auto v = value_of("wikidata")) {
    if (is_wikidata_id(*v)) {
      refs.push_back({SourceKind::kWikidata, *v});
    } else {
      skip("wikidata", *v);
    }
  }
  if (auto v = value_of("wikipedia")) {
    if (is_wikipedia_locator(*v)) {
      refs.push_back({SourceKind::kWikipedia, *v});
    } else {
      skip("wikipedia", *v);
    }
  }
  for (const char* key : {"website", "contact:website"}) {
    auto v = value_of(key);
    if (!v) continue;
    if (is_http_url(*v)) {
      refs.push_back({SourceKind::kWebsite, *v});
      break;
    }
    skip(key, *v);
  }
  return refs;
}

// --- HTML reduction --------------------------------------------------------

namespace {

const std::set<std::string, std::less<>> kDroppedElements = {"script", "style", "nav",   "footer", "noscript",
                                                             "head",   "template", "svg", "iframe"};
const std::set<std::string, std::less<>> kBlockElements = {
    "address", "article", "aside", "blockquote", "br",  "dd",      "div",   "dl",      "dt",     "figcaption",
    "figure",  "form",    "h1",    "h2",         "h3",  "h4",      "h5",    "h6",      "header", "hr",
    "li",      "main",    "ol",    "p",          "pre", "section", "table", "td",      "th",     "tr",
    "ul",      "title",   "body",  "html",       "option"};

void append_utf8(std::string& out, unsigned long cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp <= 0x10FFFF) {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Decodes the entity starting at s[i] == '&'. Returns characters consumed, 0
// when the text is not a recognised entity.
std::size_t decode_entity(std::string_view s, std::size_t i, std::string& out) {
  static const std::map<std::string, unsigned long, std::less<>> kNamed = {
      {"amp", '&'},     {"lt", '<'},      {"gt", '>'},      {"quot", '"'},    {"apos", '\''},  {"nbsp", ' '},
      {"auml", 0xE4},   {"ouml", 0xF6},   {"uuml", 0xFC},   {"Auml", 0xC4},   {"Ouml", 0xD6},  {"Uuml", 0xDC},
      {"szlig", 0xDF},  {"eacute", 0xE9}, {"egrave", 0xE8}, {"agrave", 0xE0}, {"ccedil", 0xE7}, {"copy", 0xA9},
      {"reg", 0xAE},    {"ndash", 0x2013}, {"mdash", 0x2014}, {"hellip", 0x2026}, {"euro", 0x20AC}};
  const auto semi = s.find(';', i);
  if (semi == std::string_view::npos || semi - i > 10 || semi == i + 1) return 0;
  const auto body = s.substr(i + 1, semi - i - 1);
  if (body[0] == '#') {
    unsigned long cp = 0;
    const bool hex = body.size() > 1 && (body[1] == 'x' || body[1] == 'X');
    const auto digits = body.substr(hex ? 2 : 1);
    if (digits.empty()) return 0;
    for (char c : digits) {
      const int d = std::isdigit(static_cast<unsigned char>(c)) ? c - '0'
                    : hex && std::isxdigit(static_cast<unsigned char>(c))
                        ? std::tolower(static_cast<unsigned char>(c)) - 'a' + 10
                        : -1;
      if (d < 0) return 0;
      cp = cp * (hex ? 16 : 10) + static_cast<unsigned long>(d);
      if (cp > 0x10FFFF) return 0;
    }
    append_utf8(out, cp == 0xA0 ? ' ' : cp);
    return semi - i + 1;
  }
  const auto it = kNamed.find(body);
  if (it == kNamed.end()) return 0;
  append_utf8(out, it->second);
  return semi - i + 1;
}

std::size_t find_ci(std::string_view s, std::string_view needle, std::size_t from) {
  const std::string hay = str::lower(s.substr(std::min(from, s.size())));
  const auto pos = hay.find(str::lower(needle));
  return pos == std::string::npos ? std::string_view::npos : pos + from;
}

// End of a tag starting at s[i] == '<', honouring quoted attributes.
std::size_t tag_end(std::string_view s, std::size_t i) {
  char quote = 0;
  for (std::size_t j = i + 1; j < s.size(); ++j) {
    const char c = s[j];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '>') {
      return j;
    }
  }
  return std::string_view::npos;
}

std::string collapse_lines(std::string_view raw) {
  std::string out;
  for (auto line : str::split(raw, '\n')) {
    std::string collapsed;
    bool space = false;
    for (char c : line) {
      if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
        space = true;
        continue;
      }
      if (space && !collapsed.empty()) collapsed.push_back(' ');
      space = false;
      collapsed.push_back(c);
    }
    if (collapsed.empty()) continue;
    if (!out.empty()) out.push_back('\n');
    out += collapsed;
  }
  return out;
}

}  // namespace

std::string html_to_text(std::string_view html) {
  std::string raw;
  std::size_t i = 0;
  while (i < html.size()) {
    const char c = html[i];
    if (c == '&') {
      const auto used = decode_entity(html, i, raw);
      if (used) {
        i += used;
        continue;
      }
      raw.push_back(c);
      ++i;
      continue;
    }
    if (c != '<' || i + 1 >= html.size()) {
      raw.push_back(c);
      ++i;
      continue;
    }
    const char next = html[i + 1];
    if (html.substr(i, 4) == "<!--") {
      const auto end = html.find("-->", i + 4);
      i = end == std::string_view::npos ? html.size() : end + 3;
      continue;
    }
    if (next == '!' || next == '?') {
      const auto end = html.find('>', i);
      i = end == std::string_view::npos ? html.size() : end + 1;
      continue;
    }
    const bool closing = next == '/';
    const std::size_t name_start = i + (closing ? 2 : 1);
    if (name_start >= html.size() || !std::isalpha(static_cast<unsigned char>(html[name_start]))) {
      raw.push_back(c);
      ++i;
      continue;
    }
    std::size_t name_end = name_start;
    while (name_end < html.size() && (std::isalnum(static_cast<unsigned char>(html[name_end])) || html[name_end] == '-')) {
      ++name_end;
    }
    const std::string name = str::lower(html.substr(name_start, name_end - name_start));
    const auto end = tag_end(html, i);
    if (end == std::string_view::npos) break;
    const bool self_closing = html[end - 1] == '/';
    i = end + 1;

    if (!closing && !self_closing && kDroppedElements.contains(name)) {
      // Skip to the matching close tag, counting nested opens of the same name.
      int depth = 1;
      std::size_t pos = i;
      while (depth > 0) {
        const auto open = (name == "script" || name == "style") ? std::string_view::npos : find_ci(html, "<" + name, pos);
        const auto close = find_ci(html, "</" + name, pos);
        if (close == std::string_view::npos) {
          pos = html.size();
          break;
        }
        if (open != std::string_view::npos && open < close) {
          const auto after = open + 1 + name.size();
          if (after < html.size() && !std::isalnum(static_cast<unsigned char>(html[after]))) ++depth;
          pos = after;
          continue;
        }
        --depth;
        const auto close_end = html.find('>', close);
        pos = close_end == std::string_view::npos ? html.size() : close_end + 1;
      }
      i = pos;
      continue;
    }
    if (kBlockElements.contains(name)) raw.push_back('\n');
  }
  return collapse_lines(raw);
}

// --- wikidata --------------------------------------------------------------

namespace {

std::optional<std::string> pick_language(const nlohmann::json& by_lang) {
  if (!by_lang.is_object() || by_lang.empty()) return std::nullopt;
  const auto text_of = [](const nlohmann::json& v) -> std::optional<std::string> {
    if (v.is_object() && v.contains("value") && v["value"].is_string()) return v["value"].get<std::string>();
    return std::nullopt;
  };
  if (by_lang.contains("en")) return text_of(by_lang["en"]);
  // nlohmann objects iterate in key order, so this is the first language.
  return text_of(by_lang.begin().value());
}

std::optional<std::string> render_datavalue(const nlohmann::json& dv) {
  if (!dv.is_object() || !dv.contains("type") || !dv.contains("value")) return std::nullopt;
  const std::string type = dv["type"].get<std::string>();
  const auto& v = dv["value"];
  if (type == "string" && v.is_string()) return v.get<std::string>();
  if (type == "wikibase-entityid" && v.is_object() && v.contains("id")) return v["id"].get<std::string>();
  if (type == "monolingualtext" && v.is_object() && v.contains("text")) return v["text"].get<std::string>();
  if (type == "time" && v.is_object() && v.contains("time")) return v["time"].get<std::string>();
  if (type == "quantity" && v.is_object() && v.contains("amount")) return v["amount"].get<std::string>();
  if (type == "globecoordinate" && v.is_object() && v.contains("latitude") && v.contains("longitude")) {
    return v["latitude"].dump() + "," + v["longitude"].dump();
  }
  return std::nullopt;
}

long property_number(const std::string& pid) {
  try {
    return std::stol(pid.substr(1));
  } catch (...) {
    return 0;
  }
}

}  // namespace

std::string project_wikidata(const nlohmann::json& entity_data, std::string_view qid) {
  const nlohmann::json* entity = &entity_data;
  if (entity_data.contains("entities")) {
    const auto& entities = entity_data["entities"];
    const std::string id(qid);
    if (entities.contains(id)) {
      entity = &entities[id];
    } else if (!entities.empty()) {
      // Redirected ids come back under their target id.
      entity = &entities.begin().value();
    }
  }
  std::vector<std::string> lines;
  if (entity->contains("labels")) {
    if (auto l = pick_language((*entity)["labels"])) lines.push_back("label: " + *l);
  }
  if (entity->contains("descriptions")) {
    if (auto d = pick_language((*entity)["descriptions"])) lines.push_back("description: " + *d);
  }
  if (entity->contains("claims") && (*entity)["claims"].is_object()) {
    std::vector<std::string> pids;
    for (const auto& [pid, _] : (*entity)["claims"].items()) pids.push_back(pid);
    std::sort(pids.begin(), pids.end(), [](const std::string& a, const std::string& b) {
      return std::make_pair(property_number(a), a) < std::make_pair(property_number(b), b);
    });
    for (const auto& pid : pids) {
      for (const auto& claim : (*entity)["claims"][pid]) {
        if (!claim.contains("mainsnak")) continue;
        const auto& snak = claim["mainsnak"];
        if (snak.value("snaktype", "value") != "value" || !snak.contains("datavalue")) continue;
        if (auto v = render_datavalue(snak["datavalue"])) lines.push_back(pid + ": " + *v);
      }
    }
  }
  std::string out;
  for (const auto& l : lines) {
    if (!out.empty()) out += '\n';
    out += l;
  }
  return out;
}

std::string truncate_chars(std::string_view text, std::size_t budget_chars, bool* truncated) {
  std::size_t chars = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    // Count lead bytes only.
    if ((static_cast<unsigned char>(text[i]) & 0xC0) == 0x80) continue;
    if (chars == budget_chars) {
      if (truncated) *truncated = true;
      return std::string(text.substr(0, i));
    }
    ++chars;
  }
  if (truncated) *truncated = false;
  return std::string(text);
}

std::string percent_encode(std::string_view text) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xF]);
    }
  }
  return out;
}

std::string wikidata_url(std::string_view qid) {
  return "https://www.wikidata.org/wiki/Special:EntityData/" + std::string(qid) + ".json";
}

std::string wikipedia_url(std::string_view locator) {
  const auto colon = locator.find(':');
  const auto lang = locator.substr(0, colon);
  const auto title = locator.substr(colon + 1);
  return "https://" + std::string(lang) +
         ".wikipedia.org/w/api.php?action=query&prop=extracts&explaintext=1&redirects=1&format=json"
         "&formatversion=2&titles=" +
         percent_encode(title);
}

// --- fetching --------------------------------------------------------------

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string url_for(const SourceRef& ref) {
  switch (ref.kind) {
    case SourceKind::kWikidata: return wikidata_url(ref.locator);
    case SourceKind::kWikipedia: return wikipedia_url(ref.locator);
    case SourceKind::kWebsite: return ref.locator;
  }
  return ref.locator;
}

bool is_html(const std::string& content_type, const std::string& body) {
  const std::string ct = str::lower(content_type);
  if (ct.find("text/html") != std::string::npos || ct.find("application/xhtml") != std::string::npos) return true;
  if (!ct.empty()) return false;
  return str::icontains(body.substr(0, 1024), "<html") || str::icontains(body.substr(0, 1024), "<!doctype html");
}

}  // namespace

SourceFetcher::SourceFetcher(SourceFetchConfig config)
    : config_(std::move(config)), gate_(std::chrono::milliseconds(config_.politeness_delay_ms)) {
  if (config_.mode != FetchMode::kLive && config_.fixtures == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, "record/replay needs a fixture store");
  }
  if (config_.mode != FetchMode::kReplay) {
    if (config_.http == nullptr) throw Error(ErrorCode::kInvalidArgument, "live fetching needs an HTTP client");
    if (str::trim(config_.contact).empty()) {
      throw Error(ErrorCode::kInvalidArgument, "live fetching requires a contact address for the user agent");
    }
  }
}

HttpResponse SourceFetcher::retrieve(const SourceRef& ref, const std::string& url) {
  const std::string key = std::string(to_string(ref.kind)) + "|" + ref.locator;
  if (config_.mode == FetchMode::kReplay) {
    const auto fx = config_.fixtures->get(key);
    if (!fx) throw Error(ErrorCode::kFetch, key + ": no fixture in replay mode");
    return HttpResponse{fx->value("status", 0), base64_decode(fx->value("body_b64", "")),
                        fx->value("content_type", "")};
  }
  gate_.wait();
  const HttpHeaders headers = {{"User-Agent", config_.user_agent + " (" + config_.contact + ")"}};
  HttpResponse r = get_with_retry(*config_.http, url, headers, config_.retry);
  if (config_.mode == FetchMode::kRecord) {
    config_.fixtures->put(key, {{"status", r.status},
                                {"content_type", r.content_type},
                                {"url", url},
                                {"body_b64", base64_encode(r.body)}});
  }
  return r;
}

SourceDocument SourceFetcher::fetch(const SourceRef& ref, std::size_t budget_chars) {
  const std::string url = url_for(ref);
  const HttpResponse r = retrieve(ref, url);
  if (r.status != 200) {
    throw Error(ErrorCode::kFetch, std::string(to_string(ref.kind)) + " " + ref.locator + ": HTTP " +
                                       std::to_string(r.status));
  }
  std::string text;
  switch (ref.kind) {
    case SourceKind::kWikidata: {
      const auto j = nlohmann::json::parse(r.body, nullptr, false);
      if (j.is_discarded()) throw Error(ErrorCode::kParse, "wikidata " + ref.locator + ": invalid JSON");
      text = project_wikidata(j, ref.locator);
      break;
    }
    case SourceKind::kWikipedia: {
      const auto j = nlohmann::json::parse(r.body, nullptr, false);
      if (j.is_discarded()) throw Error(ErrorCode::kParse, "wikipedia " + ref.locator + ": invalid JSON");
      if (j.contains("query") && j["query"].contains("pages")) {
        for (const auto& page : j["query"]["pages"]) {
          if (page.contains("extract") && page["extract"].is_string()) {
            text = collapse_lines(page["extract"].get<std::string>());
            break;
          }
        }
      }
      break;
    }
    case SourceKind::kWebsite:
      if (!is_html(r.content_type, r.body)) {
        throw Error(ErrorCode::kUnsupportedContent,
                    "website " + ref.locator + ": unsupported content type '" + r.content_type + "'");
      }
      text = html_to_text(r.body);
      break;
  }
  SourceDocument doc;
  doc.ref = ref;
  doc.text = truncate_chars(text, budget_chars, &doc.truncated);
  doc.retrieved_at = utc_now();
  return doc;
}

AttachResult attach_sources(DatasetEntry entry, std::span<const SourceDocument> docs) {
  entry.sources.clear();
  for (const auto& d : docs) {
    SourceEntry src;
    src.locator = d.ref.locator;
    src.text = d.text;
    src.text_available = !d.text.empty();
    entry.sources[d.ref.kind] = std::move(src);
  }
  AttachResult out{std::move(entry), false};
  out.gold = !out.entry.sources.empty();
  return out;
}

}  // namespace geonace
