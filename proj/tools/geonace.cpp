// Copyright 2026 The geonace Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end. Talks to the library only through geonace.h.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "geonace/geonace.h"

namespace {

using Settings = std::map<std::string, std::string>;
const char* const kCommands[] = {"map", "build", "classify", "score", "summarize"};

std::set<std::string> accepted_keys(const std::string& command) {
  std::set<std::string> keys;
  for (size_t i = 0;; ++i) {
    const char* k = geonace_command_key(command.c_str(), i);
    if (!k) break;
    keys.insert(k);
  }
  return keys;
}

std::string scalar_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

void flatten(const nlohmann::json& node, const std::string& prefix, Settings& out) {
  for (const auto& [key, value] : node.items()) {
    const auto name = prefix.empty() ? key : prefix + "." + key;
    if (value.is_object()) {
      flatten(value, name, out);
    } else if (value.is_array() || value.is_null()) {
      throw std::runtime_error("config setting '" + name + "' must be a scalar");
    } else {
      out[name] = scalar_text(value);
    }
  }
}

// Top-level settings apply to every command; an object named after a command
// applies to that command only.
Settings config_file_settings(const std::string& path, const std::string& command) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config file " + path);
  const auto doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw std::runtime_error("config file " + path + " is not a JSON object");
  Settings out;
  nlohmann::json shared = nlohmann::json::object();
  for (const auto& [key, value] : doc.items()) {
    bool is_command = false;
    for (const char* c : kCommands) is_command = is_command || key == c;
    if (!is_command) shared[key] = value;
  }
  flatten(shared, "", out);
  if (doc.contains(command)) {
    if (!doc[command].is_object()) throw std::runtime_error("config section '" + command + "' must be an object");
    flatten(doc[command], "", out);
  }
  return out;
}

std::string env_name(const std::string& key) {
  std::string name = "GEONACE_";
  for (char c : key) name += (c == '.') ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return name;
}

struct Cli {
  std::string config_path;
  int workers = 0;
  std::string seed;
  bool replay = false;
  bool record = false;
  bool verbose = false;
  std::vector<std::string> overrides;
  Settings flags;
};

void add_flag(CLI::App* app, Cli& cli, const std::string& flag, const std::string& key, const std::string& help) {
  app->add_option_function<std::string>(
      flag, [&cli, key](const std::string& v) { cli.flags[key] = v; }, help);
}

int run(const std::string& command, const Cli& cli) {
  const auto keys = accepted_keys(command);
  Settings settings;
  for (const auto& key : keys) {
    if (const char* v = std::getenv(env_name(key).c_str()); v != nullptr) settings[key] = v;
  }
  if (!cli.config_path.empty()) {
    for (auto& [k, v] : config_file_settings(cli.config_path, command)) settings[k] = v;
  }
  Settings flags = cli.flags;
  if (cli.workers > 0) flags["workers"] = std::to_string(cli.workers);
  if (!cli.seed.empty()) flags["seed"] = cli.seed;
  if (cli.replay) flags["mode"] = "replay";
  if (cli.record) flags["mode"] = "record";
  if (cli.verbose) flags["verbose"] = "true";
  for (const auto& o : cli.overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw std::runtime_error("--set expects key=value, got '" + o + "'");
    flags[o.substr(0, eq)] = o.substr(eq + 1);
  }
  for (auto& [k, v] : flags) settings[k] = v;

  std::unique_ptr<geonace_options, decltype(&geonace_options_free)> options(geonace_options_new(),
                                                                            geonace_options_free);
  if (!options) throw std::runtime_error("out of memory");
  for (const auto& [k, v] : settings) {
    if (geonace_options_set(options.get(), k.c_str(), v.c_str()) != GEONACE_OK) {
      throw std::runtime_error(geonace_last_error());
    }
  }
  if (cli.verbose) std::cerr << "settings: " << geonace_options_json(options.get()) << "\n";

  geonace_result* raw = nullptr;
  const auto status = geonace_run(command.c_str(), options.get(), &raw);
  std::unique_ptr<geonace_result, decltype(&geonace_result_free)> result(raw, geonace_result_free);
  const size_t n = geonace_result_diagnostic_count(result.get());
  for (size_t i = 0; i < n && cli.verbose; ++i) {
    const char *code = nullptr, *subject = nullptr, *message = nullptr;
    geonace_result_diagnostic(result.get(), i, &code, &subject, &message);
    std::cerr << "warning: " << code << " [" << subject << "] " << message << "\n";
  }
  if (n > 0 && !cli.verbose) std::cerr << n << " warning(s); rerun with --verbose to list them\n";
  if (status != GEONACE_OK) {
    std::cerr << "error (" << geonace_status_name(status) << "): " << geonace_last_error() << "\n";
    return 1;
  }
  if (command == "summarize") {
    std::cout << geonace_result_summary(result.get());
  } else {
    std::cerr << command << ": " << geonace_result_summary(result.get()) << "\n";
    std::cerr << "output: " << geonace_result_out_dir(result.get()) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Industry classification benchmark toolkit"};
  app.set_version_flag("--version", geonace_version());
  app.require_subcommand(1);
  Cli cli;
  app.add_option("--config", cli.config_path, "JSON settings file")->check(CLI::ExistingFile);
  app.add_option("--workers", cli.workers, "Parallelism bound")->check(CLI::Range(1, 256));
  app.add_option("--seed", cli.seed, "Sampling seed");
  auto* replay = app.add_flag("--replay", cli.replay, "Serve network calls from fixtures only");
  auto* record = app.add_flag("--record", cli.record, "Record network calls into fixtures");
  replay->excludes(record);
  app.add_flag("--verbose,-v", cli.verbose, "List warnings and effective settings");
  app.add_option("--set", cli.overrides, "Extra setting key=value (repeatable)");

  auto* map = app.add_subcommand("map", "Render mapping prompts and compile reviewed tag lists");
  add_flag(map, cli, "--guidelines", "guidelines", "Directory of guideline extracts and reviewed lists");
  add_flag(map, cli, "--out", "out", "Output directory");

  auto* build = app.add_subcommand("build", "Build a benchmark dataset from an element stream");
  add_flag(build, cli, "--elements", "elements", "Element stream (JSONL or Overpass JSON)");
  add_flag(build, cli, "--mapping", "mapping", "Tag mapping file or map output directory");
  add_flag(build, cli, "--per-section", "per_section", "Entries per section");
  add_flag(build, cli, "--fixtures", "fixtures", "Tile and source fixture directory");
  add_flag(build, cli, "--contact", "contact", "Contact address sent with live requests");
  add_flag(build, cli, "--out", "out", "Output dataset directory");

  auto* classify = app.add_subcommand("classify", "Run a classification pipeline over a dataset");
  add_flag(classify, cli, "--dataset", "dataset", "Dataset directory");
  add_flag(classify, cli, "--pipeline", "pipeline", "zero_shot or multi_turn");
  add_flag(classify, cli, "--input", "input",
           "Input configuration: none, satellite, external, satellite_osm, satellite_external, all");
  add_flag(classify, cli, "--variant", "variant", "Prompt template: simple or extended");
  add_flag(classify, cli, "--output-mode", "output_mode", "text or json");
  add_flag(classify, cli, "--model", "gateway.model", "Model id");
  add_flag(classify, cli, "--gateway-url", "gateway.url", "Chat completions endpoint");
  add_flag(classify, cli, "--transcripts", "transcripts", "Transcript directory for --record/--replay");
  add_flag(classify, cli, "--out", "out", "Output directory");

  auto* score = app.add_subcommand("score", "Score inference records");
  add_flag(score, cli, "--records", "records", "Records file or classify output directory");
  add_flag(score, cli, "--dataset", "dataset", "Dataset directory");
  add_flag(score, cli, "--out", "out", "Report directory");

  auto* summarize = app.add_subcommand("summarize", "Print dataset statistics");
  add_flag(summarize, cli, "--dataset", "dataset", "Dataset directory");
  add_flag(summarize, cli, "--out", "out", "Optional output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    return run(app.get_subcommands().front()->get_name(), cli);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
