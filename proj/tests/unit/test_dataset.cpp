// Copyright 2026 The geonace Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "geonace/dataset.hpp"
#include "support.hpp"

using namespace geonace;
namespace gt = geonace::testing;

namespace {

std::string validation_message(const DatasetEntry& e) {
  try {
    validate_entry(e);
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::kValidation);
    return err.what();
  }
  return "";
}

}  // namespace

TEST_CASE("gravel pit fixture parses") {
  const auto e = entry_from_json(nlohmann::json::parse(gt::slurp(gt::fixture_path("heim_kieswerk.json"))));
  CHECK(e.id == 122563530);
  CHECK(e.type == ElementType::kWay);
  CHECK(e.category == SectionCode::parse("B"));
  CHECK(e.osm_tags.size() == 8);
  CHECK(e.osm_tags.at("resource") == "sand");
  REQUIRE(e.sources.size() == 1);
  const auto& web = e.sources.at(SourceKind::kWebsite);
  CHECK(web.locator == "https://www.heim-gruppe.de");
  CHECK_FALSE(web.text_available);
  CHECK(e == gt::heim_kieswerk());
  CHECK_NOTHROW(validate_entry(e));
}

TEST_CASE("entry json round trip") {
  for (const auto& e : gt::make_dataset20().entries) {
    const auto j = entry_to_json(e);
    CHECK(j.at("schema_version") == kDatasetSchemaVersion);
    CHECK(entry_from_json(j) == e);
    CHECK(entry_from_json(nlohmann::json::parse(j.dump())) == e);
  }
}

TEST_CASE("entry validation names the field") {
  auto e = gt::make_entry(7, 'K');
  CHECK(validation_message(e).empty());

  auto t = e;
  t.name = "  ";
  CHECK(validation_message(t) == "entry 7: field 'name': must be non-empty");
  t = e;
  t.bbox = BBox{10, 50, 9, 51};
  CHECK(validation_message(t).find("field 'bbox'") != std::string::npos);
  t = e;
  t.category = SectionCode::parse("T");
  CHECK(validation_message(t).find("field 'category'") != std::string::npos);
  t = e;
  t.image_paths.erase(ImageKind::kSatellite);
  CHECK(validation_message(t) == "entry 7: field 'image_paths': missing satellite image");
  t = e;
  t.sources.clear();
  CHECK(validation_message(t).find("field 'sources'") != std::string::npos);
  t = e;
  t.sources[SourceKind::kWebsite].text.clear();
  CHECK(validation_message(t) == "entry 7: field 'sources': website claims text but text is empty");
  t.sources[SourceKind::kWebsite].text_available = false;
  CHECK(validation_message(t).empty());
  t.sources[SourceKind::kWebsite].locator.clear();
  CHECK(validation_message(t) == "entry 7: field 'sources': website has neither text nor locator");
}

TEST_CASE("label leaks") {
  auto e = gt::make_entry(3, 'K');
  CHECK_FALSE(find_label_leak(e));
  e.sources[SourceKind::kWebsite].text = "We are classified under nace code 64.19.";
  CHECK(find_label_leak(e) == "website text mentions NACE");
  e.sources[SourceKind::kWebsite].text = "Financial services (Section K)";
  CHECK(find_label_leak(e) == "website text names section K");
  e.sources[SourceKind::kWebsite].text = "see section C of our terms, or section K1, or Renaissance";
  CHECK_FALSE(find_label_leak(e));
}

TEST_CASE("dataset directory round trip is byte stable") {
  gt::TempDir tmp("ds");
  const auto d = gt::make_dataset20();
  write_dataset(d, tmp / "a");
  const auto back = read_dataset(tmp / "a");
  CHECK(back == d);
  write_dataset(back, tmp / "b");
  CHECK(gt::slurp(tmp / "a/entries.jsonl") == gt::slurp(tmp / "b/entries.jsonl"));
  CHECK(gt::slurp(tmp / "a/manifest.json") == gt::slurp(tmp / "b/manifest.json"));
  CHECK(d.find(105) != nullptr);
  CHECK(d.find(5) == nullptr);
}

TEST_CASE("writing refuses bad datasets before touching disk") {
  gt::TempDir tmp("ds");
  auto d = gt::make_dataset20();
  d.entries[3].sources[SourceKind::kWebsite].text = "NACE section D";
  try {
    write_dataset(d, tmp / "leaky");
    FAIL("expected leak");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kLeak);
  }
  CHECK_FALSE(std::filesystem::exists(tmp / "leaky"));

  d = gt::make_dataset20();
  d.entries[4].id = d.entries[2].id;
  CHECK_THROWS_AS(write_dataset(d, tmp / "dup"), Error);
  CHECK_FALSE(std::filesystem::exists(tmp / "dup"));
}

TEST_CASE("reading reports the bad line") {
  gt::TempDir tmp("ds");
  write_dataset(gt::make_dataset20(), tmp.path());
  auto body = gt::slurp(tmp / "entries.jsonl");
  gt::spit(tmp / "entries.jsonl", body + "{oops\n");
  try {
    read_dataset(tmp.path());
    FAIL("expected parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kParse);
    CHECK(std::string(e.what()).ends_with("entries.jsonl:21: not valid JSON"));
  }
  CHECK_THROWS_AS(read_dataset(tmp / "missing"), Error);
}

TEST_CASE("summary") {
  auto d = gt::make_dataset20();
  d.entries.push_back(gt::make_entry(900, 'A'));
  d.entries.back().sources[SourceKind::kWikidata] = {"Q1", "label: a", true};
  const auto s = summarize(d);
  CHECK(s.total == 21);
  CHECK(s.per_section[0] == 2);
  CHECK(s.per_section[SectionCode::parse("T").index()] == 0);
  CHECK(s.mean_resources[0][index_of(ClueSource::kOsm)] == 1.0);
  CHECK(s.mean_resources[0][index_of(ClueSource::kWebsite)] == 1.0);
  CHECK(s.mean_resources[0][index_of(ClueSource::kWikidata)] == 1.0);  // A is index 0, so the fixture adds wikidata too
  std::size_t combos = 0;
  for (const auto& [k, n] : s.histogram.counts) combos += n;
  CHECK(combos == 21);
  CHECK(s.histogram.flagged_ids.empty());
  const auto j = summary_to_json(s);
  CHECK(j.at("sections").at("A").at("entries") == 2);
  const auto text = render_summary(s);
  CHECK(text.rfind("entries: 21\n", 0) == 0);
  CHECK(text.find("warning") == std::string::npos);
}
