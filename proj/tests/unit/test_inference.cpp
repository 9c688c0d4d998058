// Copyright 2026 The geonace Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "geonace/inference.hpp"
#include "support.hpp"

using namespace geonace;
namespace gt = geonace::testing;

namespace {

struct PartCounts {
  int images = 0;
  int source_texts = 0;
};

PartCounts count_parts(const Message& m) {
  PartCounts c;
  for (const auto& p : m.parts) {
    if (p.type == MessagePart::Type::kImage) ++c.images;
    if (p.type == MessagePart::Type::kText && p.text.rfind("source (", 0) == 0) ++c.source_texts;
  }
  return c;
}

std::string text_of(const Message& m) {
  std::string out;
  for (const auto& p : m.parts) out += p.text;
  return out;
}

DatasetEntry heim_with_text() {
  auto e = gt::heim_kieswerk();
  e.sources[SourceKind::kWebsite] = {"https://www.heim-gruppe.de", "Kies und Sand", true};
  return e;
}

const PromptTemplate kSimpleText{};

}  // namespace

TEST_CASE("enum names round trip") {
  for (auto s : {InputSelection::kNone, InputSelection::kSatellite, InputSelection::kExternal,
                 InputSelection::kSatelliteOsm, InputSelection::kSatelliteExternal, InputSelection::kAll}) {
    CHECK(parse_input_selection(to_string(s)) == s);
  }
  CHECK(parse_pipeline("zero-shot") == Pipeline::kZeroShot);
  CHECK(parse_pipeline("multi_turn") == Pipeline::kMultiTurn);
  CHECK(parse_prompt_variant("extended") == PromptVariant::kExtended);
  CHECK(parse_output_mode("json") == OutputMode::kJson);
  CHECK_FALSE(parse_input_selection("everything"));
}

TEST_CASE("name-only configuration carries no images") {
  const auto m = build_zero_shot_prompt(heim_with_text(), InputSelection::kNone, kSimpleText, gt::taxonomy());
  REQUIRE(m.size() == 2);
  CHECK(m[0].role == "system");
  CHECK(m[1].role == "user");
  CHECK(m[1].parts.size() == 1);
  CHECK(m[1].parts[0].text == "Entity name: Heim Kieswerk");
}

TEST_CASE("all resources on the gravel pit") {
  const auto m = build_zero_shot_prompt(heim_with_text(), InputSelection::kAll, kSimpleText, gt::taxonomy());
  const auto c = count_parts(m[1]);
  CHECK(c.images == 2);
  CHECK(c.source_texts == 1);
  CHECK(text_of(m[1]).find("source (website):\nKies und Sand") != std::string::npos);

  // Without stored text the website is dropped for "all" and rejected otherwise.
  const auto bare = build_zero_shot_prompt(gt::heim_kieswerk(), InputSelection::kAll, kSimpleText, gt::taxonomy());
  CHECK(count_parts(bare[1]).source_texts == 0);
  CHECK_THROWS_AS(build_zero_shot_prompt(gt::heim_kieswerk(), InputSelection::kExternal, kSimpleText, gt::taxonomy()),
                  Error);
}

TEST_CASE("selected resources") {
  auto e = gt::make_entry(1, 'C');
  e.sources[SourceKind::kWikidata] = {"Q1", "label: x", true};
  using S = std::vector<ClueSource>;
  CHECK(selected_resources(e, InputSelection::kNone).empty());
  CHECK(selected_resources(e, InputSelection::kSatellite) == S{ClueSource::kSatellite});
  CHECK(selected_resources(e, InputSelection::kExternal) == S{ClueSource::kWikidata, ClueSource::kWebsite});
  CHECK(selected_resources(e, InputSelection::kSatelliteOsm) == S{ClueSource::kOsm, ClueSource::kSatellite});
  CHECK(selected_resources(e, InputSelection::kAll) ==
        S{ClueSource::kOsm, ClueSource::kSatellite, ClueSource::kWikidata, ClueSource::kWebsite});

  e.image_paths.erase(ImageKind::kSatellite);
  try {
    selected_resources(e, InputSelection::kSatellite);
    FAIL("expected missing resource");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::kValidation);
    CHECK(std::string(err.what()) == "entry 1: input configuration satellite needs a satellite image");
  }
  CHECK_THROWS_AS(selected_resources(e, InputSelection::kSatelliteExternal), Error);
  CHECK(selected_resources(e, InputSelection::kAll).size() == 3);
}

TEST_CASE("extended template describes each section") {
  const auto ext = build_zero_shot_prompt(heim_with_text(), InputSelection::kNone,
                                          {PromptVariant::kExtended, OutputMode::kJson}, gt::taxonomy());
  const auto sys = text_of(ext[0]);
  CHECK(sys.find(gt::taxonomy().section(SectionCode::parse("K")).description) != std::string::npos);
  CHECK(sys.find("insurance") != std::string::npos);
  CHECK(sys.find("DO NOT PRINT ANYTHING OTHER THAN JSON RESPONSE") != std::string::npos);
  const auto simple = text_of(build_zero_shot_prompt(heim_with_text(), InputSelection::kNone, kSimpleText,
                                                     gt::taxonomy())[0]);
  CHECK(simple.find(gt::taxonomy().section(SectionCode::parse("K")).description) == std::string::npos);
  CHECK(simple.find("SINGLE TOKEN RESPONSE ONLY") != std::string::npos);
}

TEST_CASE("clue prompts") {
  const auto sat = build_clue_prompt(ClueSource::kSatellite, {"images/1_satellite.png", ""}, gt::taxonomy());
  REQUIRE(sat.size() == 2);
  CHECK(count_parts(sat[1]).images == 1);
  const auto sys = text_of(sat[0]);
  for (const auto& s : gt::taxonomy().sections()) {
    for (const auto& kw : s.keywords) CHECK(sys.find("[" + kw + "]") != std::string::npos);
  }
  CHECK(sys.find("No economic activity clues found.") != std::string::npos);
  CHECK(sys.find("- [keyword] supporting evidence from the source") != std::string::npos);

  CHECK_THROWS_AS(build_clue_prompt(ClueSource::kWebsite, {"", "  "}, gt::taxonomy()), Error);
  CHECK_THROWS_AS(build_clue_prompt(ClueSource::kOsm, {"", "text"}, gt::taxonomy()), Error);
  const auto web = build_clue_prompt(ClueSource::kWebsite, {"", "Kies"}, gt::taxonomy());
  CHECK(count_parts(web[1]).images == 0);
  CHECK(text_of(web[1]) == "Source: Website\n\nKies");
}

TEST_CASE("decision prompts") {
  std::vector<ClueText> clues;
  for (auto it = kClueSources.rbegin(); it != kClueSources.rend(); ++it) {
    clues.push_back({*it, "clue " + std::string(to_string(*it))});
  }
  const auto m = build_decision_prompt("Heim Kieswerk", clues, kSimpleText, gt::taxonomy());
  const auto body = text_of(m[1]);
  std::size_t last = 0;
  int blocks = 0;
  for (const char* h : {"OSM image", "Satellite image", "Wikidata", "Wikipedia", "Website"}) {
    const auto pos = body.find(std::string("### Clues from ") + h + "\n");
    REQUIRE(pos != std::string::npos);
    CHECK(pos >= last);
    last = pos;
    ++blocks;
  }
  CHECK(blocks == 5);
  CHECK(body.rfind("Entity name: Heim Kieswerk\n", 0) == 0);

  const auto empty = text_of(build_decision_prompt("Heim Kieswerk", {}, kSimpleText, gt::taxonomy())[1]);
  CHECK(empty == "Entity name: Heim Kieswerk\n\nNo clues are provided.\n");
  CHECK(empty.find("### Clues") == std::string::npos);
}

TEST_CASE("prediction parsing") {
  const auto text = [](std::string_view s) { return parse_prediction(s, OutputMode::kText); };
  const auto json = [](std::string_view s) { return parse_prediction(s, OutputMode::kJson); };
  CHECK(text(" g\n").label() == "G");
  CHECK(text("UNK").label() == "UNK");
  CHECK(text("unk").kind == Prediction::Kind::kUnknown);
  CHECK(text("Based on the image, I think C").label() == "VIOLATION");
  CHECK(text("Based on the image, I think C").raw == "Based on the image, I think C");
  CHECK(text("V").label() == "VIOLATION");
  CHECK(text("").label() == "VIOLATION");
  CHECK(text("A.").label() == "VIOLATION");

  const auto a = json(R"({"EXPLANATION":"farm buildings","LLM_RESPONSE":"A"})");
  CHECK(a.label() == "A");
  CHECK(a.explanation == "farm buildings");
  CHECK(json("Sure! ```json\n{\"EXPLANATION\": \"a {brace}\", \"LLM_RESPONSE\": \" k \"}\n```").label() == "K");
  CHECK(json(R"({"LLM_RESPONSE":"A"})").label() == "VIOLATION");
  CHECK(json(R"({"EXPLANATION":"x","LLM_RESPONSE":"A"} {"EXPLANATION":"y","LLM_RESPONSE":"B"})").label() == "A");
  CHECK(json(R"({"a":1} {"EXPLANATION":"y","LLM_RESPONSE":"B"})").label() == "VIOLATION");
  CHECK(json(R"({bad} {"EXPLANATION":"y","LLM_RESPONSE":"B"})").label() == "B");
  const auto unk = json(R"({"EXPLANATION":"unclear","LLM_RESPONSE":"UNK"})");
  CHECK(unk.label() == "UNK");
  const auto bad_label = json(R"({"EXPLANATION":"x","LLM_RESPONSE":"AB"})");
  CHECK(bad_label.label() == "VIOLATION");
  CHECK_FALSE(bad_label.explanation);
  CHECK(json("G").label() == "VIOLATION");
  CHECK(text(R"({"EXPLANATION":"x","LLM_RESPONSE":"A"})").label() == "VIOLATION");
}

TEST_CASE("no-evidence detection") {
  CHECK(is_no_evidence("No economic activity clues found."));
  CHECK(is_no_evidence("No Economic Activity Found"));
  CHECK_FALSE(is_no_evidence("Economic activity clues:\n- [retail] shop"));
}

TEST_CASE("prompt goldens") {
  for (const auto& name : gt::golden_prompt_names()) {
    CAPTURE(name);
    CHECK(gt::check_golden("prompt_" + name + ".txt", gt::render_golden_prompt(name)) == "");
  }
  CHECK(gt::slurp(gt::golden_path("prompt_zero_shot_simple_text.txt")).find("SINGLE TOKEN RESPONSE ONLY") !=
        std::string::npos);
  CHECK(gt::slurp(gt::golden_path("prompt_zero_shot_extended_json.txt"))
            .find("DO NOT PRINT ANYTHING OTHER THAN JSON RESPONSE") != std::string::npos);
  CHECK(gt::slurp(gt::golden_path("prompt_clue_website.txt")).find("No economic activity clues found.") !=
        std::string::npos);
}
