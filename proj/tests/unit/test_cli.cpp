// Copyright 2026 The geonace Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>

#include "support.hpp"

namespace gt = geonace::testing;

namespace {

struct Run {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

Run cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " '" GEONACE_CLI_PATH "' " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string q(const gt::fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_CASE("usage errors exit 2") {
  CHECK(cli("").exit_code == 2);
  CHECK(cli("frobnicate").exit_code == 2);
  CHECK(cli("--replay --record map").exit_code == 2);
  CHECK(cli("--workers 0 map").exit_code == 2);
  const auto v = cli("--version");
  CHECK(v.exit_code == 0);
  CHECK(v.output.find("0.1.0") != std::string::npos);
  CHECK(cli("--help").exit_code == 0);
}

TEST_CASE("map writes prompts and the compiled mapping") {
  gt::TempDir tmp("cli");
  const auto r = cli("map --guidelines " + q(gt::data_path("guidelines")) + " --out " + q(tmp / "m"));
  CHECK(r.exit_code == 0);
  CHECK(gt::slurp(tmp / "m/prompts/K.txt") == gt::slurp(gt::golden_path("mapping_prompt_K.txt")));
  CHECK(gt::slurp(tmp / "m/nace_osm_mapping.tsv").find("amenity=bank\tK") != std::string::npos);
}

TEST_CASE("map rejects a bare key with its index") {
  gt::TempDir tmp("cli");
  gt::fs::create_directories(tmp / "g");
  gt::fs::copy_file(gt::data_path("guidelines/K.json"), tmp / "g/K.json");
  gt::spit(tmp / "g/K.reviewed.txt", R"(["amenity=bank", "office"])");
  const auto r = cli("map --guidelines " + q(tmp / "g") + " --out " + q(tmp / "m"));
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("index 1") != std::string::npos);
}

TEST_CASE("map on an empty directory fails") {
  gt::TempDir tmp("cli");
  gt::fs::create_directories(tmp / "g");
  const auto r = cli("map --guidelines " + q(tmp / "g") + " --out " + q(tmp / "m"));
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("no guideline extracts") != std::string::npos);
}

TEST_CASE("settings precedence: flag over config file over environment") {
  gt::TempDir tmp("cli");
  gt::fs::create_directories(tmp / "empty");
  const auto guidelines = gt::data_path("guidelines").string();

  // The environment alone supplies the guideline directory.
  auto r = cli("map --out " + q(tmp / "a"), "GEONACE_GUIDELINES=" + q(guidelines));
  CHECK(r.exit_code == 0);

  // A config file section overrides the environment.
  gt::spit(tmp / "cfg.json", R"({"map": {"guidelines": ")" + (tmp / "empty").string() + R"("}})");
  r = cli("--config " + q(tmp / "cfg.json") + " map --out " + q(tmp / "b"), "GEONACE_GUIDELINES=" + q(guidelines));
  CHECK(r.exit_code == 1);

  // A flag overrides both.
  r = cli("--config " + q(tmp / "cfg.json") + " map --guidelines " + q(guidelines) + " --out " + q(tmp / "c"),
          "GEONACE_GUIDELINES=/nonexistent");
  CHECK(r.exit_code == 0);

  r = cli("--set nonsense=1 map --guidelines " + q(guidelines) + " --out " + q(tmp / "d"));
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("nonsense") != std::string::npos);
}

TEST_CASE("verbose lists warnings") {
  gt::TempDir tmp("cli");
  gt::fs::create_directories(tmp / "g");
  for (const char* f : {"K.json", "K.reviewed.txt"}) gt::fs::copy_file(gt::data_path("guidelines") / f, tmp / "g" / f);
  gt::fs::copy_file(gt::data_path("guidelines/K.json"), tmp / "g/L.json");
  auto r = cli("map --guidelines " + q(tmp / "g") + " --out " + q(tmp / "m"));
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("1 warning(s)") != std::string::npos);
  r = cli("-v map --guidelines " + q(tmp / "g") + " --out " + q(tmp / "m2"));
  CHECK(r.output.find("warning: unreviewed [L]") != std::string::npos);
}
