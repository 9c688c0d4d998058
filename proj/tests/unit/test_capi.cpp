// Copyright 2026 The geonace Authors
// SPDX-License-Identifier: Apache-2.0

// Exercises the shared library through its C header only.

#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "geonace/geonace.h"

namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  std::random_device rd;
  auto p = fs::temp_directory_path() / ("geonace-capi-" + tag + "-" + std::to_string(rd()));
  fs::remove_all(p);
  return p;
}

struct Options {
  geonace_options* o = geonace_options_new();
  ~Options() { geonace_options_free(o); }
  void set(const char* k, const std::string& v) { REQUIRE(geonace_options_set(o, k, v.c_str()) == GEONACE_OK); }
};

struct Result {
  geonace_result* r = nullptr;
  ~Result() { geonace_result_free(r); }
};

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::string(geonace_version()) == "0.1.0");
  CHECK(std::string(geonace_status_name(GEONACE_OK)) == "ok");
  CHECK(std::string(geonace_status_name(GEONACE_E_LEAK)) != std::string(geonace_status_name(GEONACE_E_IO)));
  CHECK(geonace_status_name(static_cast<geonace_status>(99)) != nullptr);
}

TEST_CASE("command keys") {
  bool saw_guidelines = false;
  for (size_t i = 0; const char* k = geonace_command_key("map", i); ++i) {
    saw_guidelines = saw_guidelines || std::string(k) == "guidelines";
  }
  CHECK(saw_guidelines);
  CHECK(geonace_command_key("frobnicate", 0) == nullptr);
  CHECK(geonace_command_key("map", 10000) == nullptr);
}

TEST_CASE("options") {
  Options opt;
  opt.set("out", "/tmp/x");
  CHECK(std::string(geonace_options_json(opt.o)).find("\"out\":\"/tmp/x\"") != std::string::npos);
  CHECK(geonace_options_set(nullptr, "a", "b") == GEONACE_E_INVALID_ARGUMENT);
  CHECK(geonace_options_set(opt.o, nullptr, "b") == GEONACE_E_INVALID_ARGUMENT);
  CHECK(std::strlen(geonace_last_error()) > 0);
}

TEST_CASE("map runs through the C API") {
  const auto out = fresh_dir("map");
  Options opt;
  opt.set("guidelines", std::string(GEONACE_SOURCE_DIR) + "/data/guidelines");
  opt.set("out", out.string());
  Result res;
  REQUIRE(geonace_run("map", opt.o, &res.r) == GEONACE_OK);
  CHECK(fs::exists(out / "prompts" / "K.txt"));
  CHECK(fs::exists(out / "nace_osm_mapping.tsv"));
  CHECK(fs::exists(out / "run_manifest.json"));
  CHECK(std::string(geonace_result_out_dir(res.r)) == out.string());
  CHECK(std::string(geonace_result_summary(res.r)).find("reviewed") != std::string::npos);
  fs::remove_all(out);
}

TEST_CASE("failures keep diagnostics and report a status") {
  const auto dir = fresh_dir("empty");
  fs::create_directories(dir);
  fs::copy_file(std::string(GEONACE_SOURCE_DIR) + "/data/guidelines/K.json", dir / "K.json");
  Options opt;
  opt.set("guidelines", dir.string());
  opt.set("out", (dir / "out").string());
  Result res;
  CHECK(geonace_run("map", opt.o, &res.r) == GEONACE_E_VALIDATION);
  CHECK(std::string(geonace_last_error()).find("no reviewed tag lists") != std::string::npos);
  REQUIRE(res.r != nullptr);
  REQUIRE(geonace_result_diagnostic_count(res.r) == 1);
  const char *code = nullptr, *subject = nullptr, *message = nullptr;
  CHECK(geonace_result_diagnostic(res.r, 0, &code, &subject, &message) == GEONACE_OK);
  CHECK(std::string(code) == "unreviewed");
  CHECK(std::string(subject) == "K");
  CHECK(geonace_result_diagnostic(res.r, 1, &code, &subject, &message) == GEONACE_E_INVALID_ARGUMENT);

  Options bad;
  bad.set("guidelines", dir.string());
  bad.set("bogus", "1");
  CHECK(geonace_run("map", bad.o, nullptr) == GEONACE_E_INVALID_ARGUMENT);
  CHECK(geonace_run("frobnicate", bad.o, nullptr) == GEONACE_E_INVALID_ARGUMENT);
  CHECK(geonace_run(nullptr, bad.o, nullptr) == GEONACE_E_INVALID_ARGUMENT);
  fs::remove_all(dir);
}

TEST_CASE("dataset handle") {
  const auto dir = fresh_dir("ds");
  fs::create_directories(dir);
  {
    std::ifstream in(std::string(GEONACE_SOURCE_DIR) + "/tests/fixtures/heim_kieswerk.json");
    std::ofstream(dir / "entries.jsonl") << in.rdbuf();
    std::ofstream(dir / "manifest.json") << R"({"schema_version":1,"name":"t","version":"1"})";
  }
  geonace_dataset* ds = nullptr;
  REQUIRE(geonace_dataset_open(dir.string().c_str(), &ds) == GEONACE_OK);
  CHECK(geonace_dataset_size(ds) == 1);
  int64_t id = 0;
  char category = 0;
  CHECK(geonace_dataset_entry(ds, 0, &id, &category) == GEONACE_OK);
  CHECK(id == 122563530);
  CHECK(category == 'B');
  CHECK(geonace_dataset_entry(ds, 1, &id, &category) == GEONACE_E_INVALID_ARGUMENT);
  geonace_dataset_free(ds);

  geonace_dataset* missing = nullptr;
  CHECK(geonace_dataset_open((dir / "nope").string().c_str(), &missing) != GEONACE_OK);
  CHECK(missing == nullptr);
  fs::remove_all(dir);
}

TEST_CASE("label parsing") {
  const auto label = [](const std::string& s, int json) { return std::string(geonace_parse_label(s.data(), s.size(), json)); };
  CHECK(label(" g\n", 0) == "G");
  CHECK(label("UNK", 0) == "UNK");
  CHECK(label("I think C", 0) == "VIOLATION");
  CHECK(label(R"({"EXPLANATION":"x","LLM_RESPONSE":"A"})", 1) == "A");
  CHECK(std::string(geonace_parse_label(nullptr, 5, 0)) == "VIOLATION");
  const char with_nul[] = {'K', '\0', 'x'};
  CHECK(std::string(geonace_parse_label(with_nul, 1, 0)) == "K");
  CHECK(std::string(geonace_parse_label(with_nul, 3, 0)) == "VIOLATION");
}
