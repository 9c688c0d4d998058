// Copyright 2026 The geonace Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <sstream>

#include "geonace/cluemetrics.hpp"
#include "support.hpp"

using namespace geonace;
namespace gt = geonace::testing;

namespace {

Rational q(int n, int d = 1) { return Rational(n) / d; }

SectionCode sec(char c) { return SectionCode::parse(std::string(1, c)); }

// Single multi-turn inference: truth K, predicted G, one clue per source.
std::vector<ClueText> worked_clues() {
  std::string osm = "Economic activity clues:\n";
  const char* g_keywords[] = {"retail", "trade", "wholesale", "resale", "vehicle-repair", "retail",
                              "trade",  "retail", "wholesale", "trade",  "retail",         "resale"};
  for (const char* kw : g_keywords) osm += std::string("- [") + kw + "] shop tag\n";
  osm += "- [transport] bus stop nearby\n";
  return {
      {ClueSource::kOsm, osm},
      {ClueSource::kSatellite,
       "Economic activity clues:\n- [accommodation] hotel roof\n- [Retail] parking lot\n- [transport] rail"},
      {ClueSource::kWikidata, "Economic activity clues:\n- [insurance] instance of insurance company"},
      {ClueSource::kWikipedia, "Economic activity clues:\n- [finance] provides financial services"},
      {ClueSource::kWebsite, "No Economic Activity Found"},
  };
}

InferenceRecord record(std::int64_t id, const std::string& answer, Pipeline p = Pipeline::kZeroShot) {
  InferenceRecord r;
  r.entry_id = id;
  r.pipeline = p;
  r.model_id = "m";
  r.prediction = parse_prediction(answer, OutputMode::kText);
  r.calls = 1;
  return r;
}

Dataset dataset_of(const std::vector<std::pair<std::int64_t, char>>& truth) {
  Dataset d;
  for (auto [id, letter] : truth) d.entries.push_back(gt::make_entry(id, letter));
  return d;
}

}  // namespace

TEST_CASE("rational formatting") {
  CHECK(to_string(q(12, 13)) == "12/13");
  CHECK(to_string(q(2, 4)) == "1/2");
  CHECK(to_string(q(3)) == "3");
  CHECK(to_string(q(0)) == "0");
  CHECK(to_double(q(1, 4)) == 0.25);
}

TEST_CASE("keyword extraction") {
  Diagnostics diag;
  const auto hits = extract_keywords(
      {ClueSource::kOsm, "- [ Retail ] a\n- [retail] b [bogus] [] [trade]\n[multi\nline]"}, gt::taxonomy(), &diag);
  REQUIRE(hits.size() == 3);
  CHECK(hits[0] == KeywordHit{"retail", sec('G')});
  CHECK(hits[2].keyword == "trade");
  REQUIRE(diag.size() == 2);
  CHECK(diag.snapshot()[0].code == "unknown_keyword");
  CHECK(extract_keywords({ClueSource::kOsm, "No economic activity clues found."}, gt::taxonomy()).empty());
  CHECK(extract_keywords({ClueSource::kOsm, "[IT] services"}, gt::taxonomy()).at(0).section == sec('J'));
}

TEST_CASE("frequency vectors") {
  const std::vector<KeywordHit> hits = {{"retail", sec('G')}, {"trade", sec('G')}, {"transport", sec('H')}};
  const auto v = frequency_vector(hits);
  CHECK(v.values[sec('G').index()] == q(2, 3));
  CHECK(v.values[sec('H').index()] == q(1, 3));
  CHECK(v.sum() == 1);
  const auto z = frequency_vector({});
  CHECK(z.is_zero());
  CHECK(z.sum() == 0);
}

TEST_CASE("worked example projections") {
  Diagnostics diag;
  const auto profile = clue_profile(worked_clues(), gt::taxonomy(), &diag);
  CHECK(diag.size() == 0);
  const auto vg = project(profile, sec('K'), ProjectionKind::kGroundTruth);
  const auto vp = project(profile, sec('G'), ProjectionKind::kPrediction);
  CHECK(vg.values == std::array<Rational, 5>{q(0), q(0), q(1), q(1), q(0)});
  CHECK(vp.values == std::array<Rational, 5>{q(12, 13), q(1, 3), q(0), q(0), q(0)});

  std::vector<ClueText> dup = worked_clues();
  dup.push_back(dup.front());
  CHECK_THROWS_AS(clue_profile(dup, gt::taxonomy()), Error);

  const auto all = worked_clues();
  std::vector<ClueText> partial(all.begin() + 2, all.end());
  const auto p = clue_profile(partial, gt::taxonomy());
  CHECK_FALSE(p.has(ClueSource::kOsm));
  CHECK(project(p, sec('K'), ProjectionKind::kGroundTruth).values[0] == 0);
}

TEST_CASE("worked example through score") {
  auto d = dataset_of({{1, 'K'}});
  auto r = record(1, "G", Pipeline::kMultiTurn);
  r.clues = worked_clues();
  const auto rep = score(std::vector{r}, d, gt::taxonomy());
  CHECK(rep.multi_turn_inferences == 1);
  CHECK(rep.correctness[index_of(ClueSource::kWikidata)] == q(1));
  CHECK(rep.correctness[index_of(ClueSource::kWikipedia)] == q(1));
  CHECK(rep.correctness[index_of(ClueSource::kOsm)] == q(0));
  CHECK(rep.effectiveness[index_of(ClueSource::kSatellite)] == q(1, 3));
  CHECK(rep.effectiveness[index_of(ClueSource::kOsm)] == q(12, 13));
  CHECK(rep.effectiveness[index_of(ClueSource::kWebsite)] == q(0));
  CHECK(rep.no_evidence[index_of(ClueSource::kWebsite)] == 1);
  CHECK(rep.information_discovery[index_of(ClueSource::kWebsite)] == q(0));
  CHECK(rep.information_discovery[index_of(ClueSource::kOsm)] == q(1));
  CHECK(rep.accuracy == 0);
}

TEST_CASE("unknown and violation answers are left out of clue scoring") {
  auto d = dataset_of({{1, 'K'}, {2, 'K'}, {3, 'K'}});
  std::vector<InferenceRecord> rs;
  for (auto [id, answer] : {std::pair{1, "K"}, std::pair{2, "UNK"}, std::pair{3, "maybe K"}}) {
    auto r = record(id, answer, Pipeline::kMultiTurn);
    r.clues = {{ClueSource::kWikidata, "- [insurance] x"}, {ClueSource::kOsm, "No economic activity clues found."}};
    rs.push_back(r);
  }
  const auto rep = score(rs, d, gt::taxonomy());
  CHECK(rep.scored_inferences[index_of(ClueSource::kWikidata)] == 1);
  CHECK(rep.clue_calls[index_of(ClueSource::kWikidata)] == 3);
  CHECK(rep.correctness[index_of(ClueSource::kWikidata)] == q(1));
  CHECK(rep.information_discovery[index_of(ClueSource::kOsm)] == q(0));
  CHECK_FALSE(rep.correctness[index_of(ClueSource::kWebsite)]);
  CHECK_FALSE(rep.information_discovery[index_of(ClueSource::kWebsite)]);
  CHECK(information_discovery(0, 0) == std::nullopt);
  CHECK(information_discovery(1, 4) == q(3, 4));
}

// Reference values from tests/oracles/f1_oracle.py (scikit-learn).
TEST_CASE("classification metrics against the reference") {
  std::istringstream in(gt::slurp(gt::fixture_path("score40.tsv")));
  std::string line;
  std::vector<std::pair<std::int64_t, char>> truth;
  std::vector<InferenceRecord> rs;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream f(line);
    std::int64_t id;
    std::string t, p;
    f >> id >> t >> p;
    truth.push_back({id, t[0]});
    rs.push_back(record(id, p));
  }
  REQUIRE(rs.size() == 40);
  const auto rep = score(rs, dataset_of(truth), gt::taxonomy());
  CHECK(rep.inferences == 40);
  CHECK(rep.correct == 24);
  CHECK(rep.unknown == 3);
  CHECK(rep.violations == 2);
  CHECK(rep.accuracy == q(3, 5));
  CHECK(rep.unknown_ratio == q(3, 40));
  CHECK(rep.violation_ratio == q(1, 20));
  const double tol = 1e-12;
  CHECK(rep.macro_precision == doctest::Approx(0.5083333333333333).epsilon(tol));
  CHECK(rep.macro_recall == doctest::Approx(0.5240476190476191).epsilon(tol));
  CHECK(rep.macro_f1 == doctest::Approx(0.48916666666666664).epsilon(tol));
  CHECK(rep.weighted_precision == doctest::Approx(0.68749999999999989).epsilon(tol));
  CHECK(rep.weighted_recall == doctest::Approx(0.59999999999999998).epsilon(tol));
  CHECK(rep.weighted_f1 == doctest::Approx(0.61625000000000008).epsilon(tol));

  std::int64_t cells = 0, trace = 0;
  for (int r = 0; r < kSectionCount; ++r) {
    for (int c = 0; c <= kSectionCount; ++c) cells += rep.confusion[r][c];
    cells += rep.violations_by_truth[r];
    trace += rep.confusion[r][r];
  }
  CHECK(cells == 40);
  CHECK(trace == rep.correct);
}

TEST_CASE("failed records are counted but not scored") {
  auto d = dataset_of({{1, 'A'}, {2, 'B'}});
  auto failed = record(2, "B");
  failed.failed = true;
  const auto rep = score(std::vector{record(1, "A"), failed}, d, gt::taxonomy());
  CHECK(rep.records == 2);
  CHECK(rep.failed == 1);
  CHECK(rep.inferences == 1);
  CHECK(rep.accuracy == 1);
}

TEST_CASE("score preconditions") {
  auto d = dataset_of({{1, 'A'}});
  CHECK_THROWS_AS(score(std::vector<InferenceRecord>{}, d, gt::taxonomy()), Error);
  try {
    score(std::vector{record(9, "A")}, d, gt::taxonomy());
    FAIL("expected unknown entry");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kValidation);
  }
}

TEST_CASE("report serialisation") {
  auto d = dataset_of({{1, 'K'}});
  auto r = record(1, "G", Pipeline::kMultiTurn);
  r.clues = worked_clues();
  const auto rep = score(std::vector{r}, d, gt::taxonomy());
  const auto j = report_to_json(rep);
  CHECK(j.at("accuracy").at("exact") == "0");
  const auto text = render_report(rep);
  CHECK(text.find("accuracy") != std::string::npos);
  const auto csv = render_source_csv(rep);
  CHECK(csv.rfind("source,I_c,NEI_c,scored,correctness,effectiveness,information_discovery\n", 0) == 0);
  CHECK(csv.find("osm,1,0,1,0.000000,0.923077,1.000000\n") != std::string::npos);
  CHECK(csv.find("website,1,1,1,0.000000,0.000000,0.000000\n") != std::string::npos);
  CHECK(j.at("sources").at("osm").at("effectiveness").at("exact") == "12/13");
}
