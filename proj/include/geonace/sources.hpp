// Copyright 2026 The geonace Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "geonace/dataset.hpp"
#include "geonace/error.hpp"
#include "geonace/fetch.hpp"
#include "geonace/types.hpp"

namespace geonace {

inline constexpr std::size_t kDefaultSourceBudgetChars = 8000;

// Locator forms: wikidata "Q<digits>", wikipedia "<lang>:<title>",
// website an absolute http(s) URL.
struct SourceRef {
  SourceKind kind = SourceKind::kWebsite;
  std::string locator;

  friend bool operator==(const SourceRef&, const SourceRef&) = default;
};

struct SourceDocument {
  SourceRef ref;
  std::string text;
  std::string retrieved_at;
  bool truncated = false;
};

bool is_wikidata_id(std::string_view locator);
bool is_http_url(std::string_view locator);

// One ref per recognised key, ordered wikidata, wikipedia, website. The
// website tag wins over contact:website. Malformed values are skipped and
// reported to `diagnostics` under `subject`.
std::vector<SourceRef> refs_from_tags(const std::map<std::string, std::string>& tags,
                                      Diagnostics* diagnostics = nullptr, const std::string& subject = {});

// Visible text of an HTML page: drops script, style, nav, footer and the
// document head, keeps headings and paragraphs in order, one block per line.
std::string html_to_text(std::string_view html);

// "label: ..", "description: .." then one "Pnnn: value" line per claim value.
std::string project_wikidata(const nlohmann::json& entity_data, std::string_view qid);

// Cuts to at most `budget_chars` code points.
std::string truncate_chars(std::string_view text, std::size_t budget_chars, bool* truncated);

std::string wikidata_url(std::string_view qid);
std::string wikipedia_url(std::string_view locator);
std::string percent_encode(std::string_view text);

struct SourceFetchConfig {
  FetchMode mode = FetchMode::kReplay;
  HttpClient* http = nullptr;
  FixtureStore* fixtures = nullptr;
  // Live requests identify themselves with this agent and contact address.
  std::string user_agent = "geonace/0.1";
  std::string contact;
  RetryPolicy retry;
  int politeness_delay_ms = 0;
};

class SourceFetcher {
 public:
  explicit SourceFetcher(SourceFetchConfig config);

  // Throws kFetch on HTTP failure, kUnsupportedContent for non-HTML websites.
  SourceDocument fetch(const SourceRef& ref, std::size_t budget_chars = kDefaultSourceBudgetChars);

 private:
  HttpResponse retrieve(const SourceRef& ref, const std::string& url);

  SourceFetchConfig config_;
  PolitenessGate gate_;
};

struct AttachResult {
  DatasetEntry entry;
  // False when no source document could be attached.
  bool gold = false;
};

AttachResult attach_sources(DatasetEntry entry, std::span<const SourceDocument> docs);

}  // namespace geonace
