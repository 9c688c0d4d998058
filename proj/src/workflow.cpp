// Copyright 2026 The geonace Authors
// SPDX-License-Identifier: Apache-2.0

#include "geonace/workflow.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <thread>

#include <fmt/chrono.h>
#include <fmt/format.h>

#include "geonace/corpus.hpp"
#include "geonace/gateway.hpp"
#include "geonace/geotile.hpp"
#include "geonace/pipeline.hpp"
#include "geonace/sources.hpp"
#include "geonace/taxonomy.hpp"
#include "strings.hpp"

namespace geonace {

namespace fs = std::filesystem;
using nlohmann::json;

// --- options ---------------------------------------------------------------

std::string Options::str(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

std::string Options::required(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end() || it->second.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "missing required setting '" + key + "'");
  }
  return it->second;
}

namespace {

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw Error(ErrorCode::kInvalidArgument, "setting '" + key + "' is not a number: '" + text + "'");
  }
  return value;
}

}  // namespace

std::int64_t Options::integer(const std::string& key, std::int64_t fallback) const {
  return has(key) ? parse_number<std::int64_t>(key, str(key)) : fallback;
}

std::uint64_t Options::seed(const std::string& key, std::uint64_t fallback) const {
  return has(key) ? parse_number<std::uint64_t>(key, str(key)) : fallback;
}

double Options::real(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  try {
    std::size_t used = 0;
    const double v = std::stod(str(key), &used);
    if (used == str(key).size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::kInvalidArgument, "setting '" + key + "' is not a number: '" + str(key) + "'");
}

bool Options::flag(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const auto v = str::lower(str(key));
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw Error(ErrorCode::kInvalidArgument, "setting '" + key + "' is not a boolean: '" + str(key) + "'");
}

void Options::check_keys(const std::string& command, const std::set<std::string>& allowed) const {
  for (const auto& [key, value] : values_) {
    if (!allowed.contains(key)) {
      throw Error(ErrorCode::kInvalidArgument, "unknown setting '" + key + "' for " + command);
    }
  }
}

const std::set<std::string>& command_keys(const std::string& command) {
  static const std::set<std::string> common = {"out", "workers", "seed", "mode", "verbose", "lexicon"};
  static const std::map<std::string, std::set<std::string>> table = [] {
    std::map<std::string, std::set<std::string>> t;
    t["map"] = {"guidelines"};
    t["build"] = {"elements",          "mapping",           "per_section",          "fixtures",
                  "dataset.name",      "dataset.version",   "tiles.osm.url",        "tiles.osm.attribution",
                  "tiles.osm.max_parallel", "tiles.osm.delay_ms", "tiles.satellite.url", "tiles.satellite.attribution",
                  "tiles.satellite.max_parallel", "tiles.satellite.delay_ms", "zoom.max_tiles", "zoom.min",
                  "zoom.max",          "sources.budget",    "sources.delay_ms",     "user_agent",
                  "contact",           "retry.attempts",    "retry.backoff_ms",     "http.timeout_s"};
    t["classify"] = {"dataset",         "pipeline",          "input",           "variant",
                     "output_mode",     "gateway.url",       "gateway.model",   "gateway.temperature",
                     "gateway.key_env", "gateway.max_tokens", "gateway.clue_max_tokens", "transcripts",
                     "retry.attempts",  "retry.backoff_ms",  "http.timeout_s"};
    t["score"] = {"records", "dataset"};
    t["summarize"] = {"dataset"};
    for (auto& [name, keys] : t) keys.insert(common.begin(), common.end());
    return t;
  }();
  const auto it = table.find(command);
  if (it == table.end()) throw Error(ErrorCode::kInvalidArgument, "unknown command '" + command + "'");
  return it->second;
}

// --- manifests and digests -------------------------------------------------

std::string digest_path(const fs::path& path) {
  if (fs::is_regular_file(path)) return sha256_hex(str::read_file(path.string()));
  if (!fs::is_directory(path)) throw Error(ErrorCode::kNotFound, "no such input: " + path.string());
  std::vector<std::pair<std::string, std::string>> files;
  for (const auto& e : fs::recursive_directory_iterator(path)) {
    if (!e.is_regular_file()) continue;
    files.emplace_back(fs::relative(e.path(), path).generic_string(), sha256_hex(str::read_file(e.path().string())));
  }
  std::sort(files.begin(), files.end());
  std::string listing;
  for (const auto& [rel, digest] : files) listing += rel + " " + digest + "\n";
  return sha256_hex(listing);
}

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(now));
}

struct RunManifest {
  std::string command;
  json config;
  std::map<std::string, std::string> inputs;  // name -> digest
  std::string started_at = utc_now();

  json to_json() const {
    return {{"command", command},
            {"tool_version", kVersion},
            {"config", config},
            {"config_sha256", sha256_hex(config.dump())},
            {"inputs", inputs},
            {"started_at", started_at},
            {"finished_at", utc_now()}};
  }
};

RunManifest start_manifest(const std::string& command, const Options& options) {
  RunManifest m;
  m.command = command;
  m.config = options.values();
  return m;
}

fs::path prepare_out(const Options& options) {
  const fs::path out = options.required("out");
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create output directory " + out.string() + ": " + ec.message());
  return out;
}

void finish(const fs::path& out, const RunManifest& manifest, const Diagnostics& diagnostics) {
  str::write_file((out / kRunManifestFile).string(), manifest.to_json().dump(2) + "\n");
  const auto diag_path = out / "diagnostics.jsonl";
  if (diagnostics.size() > 0) {
    diagnostics.write_jsonl(diag_path.string());
  } else {
    fs::remove(diag_path);
  }
}

fs::path data_file(const Options& options, const std::string& key, const char* name) {
  if (options.has(key)) {
    fs::path p = options.str(key);
    if (fs::is_directory(p)) p /= name;
    return p;
  }
  return fs::path(GEONACE_DATA_DIR) / name;
}

Taxonomy load_taxonomy(const Options& options) {
  return Taxonomy::load(data_file(options, "lexicon", "nace_lexicon.tsv"));
}

FetchMode fetch_mode(const Options& options) {
  const auto text = options.str("mode", "live");
  const auto mode = parse_fetch_mode(text);
  if (!mode) throw Error(ErrorCode::kInvalidArgument, "mode must be live, record or replay, not '" + text + "'");
  return *mode;
}

RetryPolicy retry_policy(const Options& options) {
  RetryPolicy r;
  r.attempts = static_cast<int>(options.integer("retry.attempts", r.attempts));
  r.backoff_ms = static_cast<int>(options.integer("retry.backoff_ms", r.backoff_ms));
  if (r.attempts < 1 || r.backoff_ms < 0) throw Error(ErrorCode::kInvalidArgument, "invalid retry policy");
  return r;
}

int worker_count(const Options& options) {
  const auto w = options.integer("workers", 1);
  if (w < 1 || w > 256) throw Error(ErrorCode::kInvalidArgument, "workers must be in [1, 256]");
  return static_cast<int>(w);
}

std::shared_ptr<HttpClient> http_or_default(std::shared_ptr<HttpClient> http, const Options& options) {
  if (http) return http;
  return make_http_client(std::chrono::seconds(options.integer("http.timeout_s", 60)));
}

}  // namespace

// --- map -------------------------------------------------------------------

CommandResult cmd_map(const Options& options, Diagnostics& diagnostics) {
  options.check_keys("map", command_keys("map"));
  auto manifest = start_manifest("map", options);
  const fs::path dir = options.required("guidelines");
  if (!fs::is_directory(dir)) throw Error(ErrorCode::kNotFound, "guideline directory not found: " + dir.string());

  std::vector<fs::path> extracts;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") extracts.push_back(e.path());
  }
  std::sort(extracts.begin(), extracts.end());
  if (extracts.empty()) throw Error(ErrorCode::kValidation, "no guideline extracts (*.json) in " + dir.string());

  const auto out = prepare_out(options);
  fs::create_directories(out / "prompts");
  TagMapping mapping;
  int reviewed = 0;
  for (const auto& path : extracts) {
    const auto section = SectionCode::parse(path.stem().string());
    const auto extract = load_guideline_extract(path);
    str::write_file((out / "prompts" / (section.str() + ".txt")).string(), render_mapping_prompt(extract));
    const auto response = dir / (section.str() + ".reviewed.txt");
    if (!fs::exists(response)) {
      diagnostics.warn("unreviewed", section.str(), "no reviewed response " + response.filename().string());
      continue;
    }
    try {
      for (const auto& tag : parse_llm_tag_list(str::read_file(response.string()))) mapping.add(tag, section);
    } catch (const Error& e) {
      throw Error(e.code(), response.string() + ": " + e.what());
    }
    manifest.inputs[response.filename().string()] = digest_path(response);
    ++reviewed;
  }
  if (mapping.empty()) throw Error(ErrorCode::kValidation, "no reviewed tag lists in " + dir.string());
  str::write_file((out / "nace_osm_mapping.tsv").string(), mapping.serialize());
  manifest.inputs["guidelines"] = digest_path(dir);
  finish(out, manifest, diagnostics);
  return {out, fmt::format("{} tags from {} reviewed sections", mapping.entries().size(), reviewed)};
}

// --- build -----------------------------------------------------------------

namespace {

TileProviderConfig tile_config(const Options& options, const std::string& name, const std::string& default_url,
                               const std::string& default_attribution) {
  TileProviderConfig c;
  const auto prefix = "tiles." + name + ".";
  c.name = name;
  c.url_template = options.str(prefix + "url", default_url);
  c.attribution = options.str(prefix + "attribution", default_attribution);
  c.max_parallel = static_cast<int>(options.integer(prefix + "max_parallel", 2));
  c.politeness_delay_ms = static_cast<int>(options.integer(prefix + "delay_ms", 0));
  c.retry = retry_policy(options);
  if (c.max_parallel < 1) throw Error(ErrorCode::kInvalidArgument, prefix + "max_parallel must be >= 1");
  return c;
}

struct BuildContext {
  fs::path out;
  TileFetcher* osm = nullptr;
  TileFetcher* satellite = nullptr;
  SourceFetcher* sources = nullptr;
  ZoomPolicy zoom;
  std::size_t budget = kDefaultSourceBudgetChars;
  Diagnostics* diagnostics = nullptr;
};

std::optional<DatasetEntry> materialize(const LabeledElement& le, const BuildContext& ctx) {
  const auto& el = le.element;
  const auto subject = std::to_string(el.id);
  DatasetEntry entry;
  entry.id = el.id;
  entry.type = el.type;
  entry.name = el.tags.at("name");
  entry.bbox = el.bbox;
  entry.osm_tags = el.tags;
  entry.category = le.category;

  std::vector<SourceDocument> docs;
  for (const auto& ref : refs_from_tags(el.tags, ctx.diagnostics, subject)) {
    try {
      docs.push_back(ctx.sources->fetch(ref, ctx.budget));
    } catch (const Error& e) {
      ctx.diagnostics->warn("source_failed", subject, std::string(to_string(ref.kind)) + ": " + e.what());
    }
  }
  auto attached = attach_sources(std::move(entry), docs);
  if (!attached.gold) {
    ctx.diagnostics->warn("no_sources", subject, "no external source could be retrieved");
    return std::nullopt;
  }
  entry = std::move(attached.entry);
  if (const auto leak = find_label_leak(entry)) {
    ctx.diagnostics->warn("label_leak", subject, *leak);
    return std::nullopt;
  }

  std::vector<fs::path> written;
  try {
    const int z = dynamic_zoom(entry.bbox, ctx.zoom);
    const auto grid = grid_for(entry.bbox, z);
    for (auto [kind, fetcher] : {std::pair{ImageKind::kOsm, ctx.osm}, std::pair{ImageKind::kSatellite, ctx.satellite}}) {
      const auto image = fetch_and_stitch(grid, *fetcher, kind);
      const auto rel = fs::path("images") / fmt::format("{}_{}.png", el.id, to_string(kind));
      write_png(image.pixels, (ctx.out / rel).string());
      written.push_back(ctx.out / rel);
      entry.image_paths[kind] = rel.generic_string();
    }
  } catch (const Error& e) {
    for (const auto& p : written) fs::remove(p);
    ctx.diagnostics->warn("tiles_failed", subject, e.what());
    return std::nullopt;
  }
  return entry;
}

}  // namespace

CommandResult cmd_build(const Options& options, Diagnostics& diagnostics, std::shared_ptr<HttpClient> http) {
  options.check_keys("build", command_keys("build"));
  auto manifest = start_manifest("build", options);
  const fs::path elements_path = options.required("elements");
  const auto mapping_path = data_file(options, "mapping", "nace_osm_mapping.tsv");
  const auto per_section = options.integer("per_section", 1);
  if (per_section < 1) throw Error(ErrorCode::kInvalidArgument, "per_section must be >= 1");
  const auto seed = options.seed("seed", 0);
  const auto mode = fetch_mode(options);
  const int workers = worker_count(options);

  const auto mapping = TagMapping::load(mapping_path);
  const auto elements = read_element_stream(elements_path, diagnostics);
  const auto labeled = label_pool(elements, mapping, &diagnostics);
  auto candidates = shuffled_gold_candidates(labeled, seed);
  for (auto section : all_sections()) {
    if (is_household_section(section)) continue;
    const auto n = candidates.contains(section) ? candidates[section].size() : 0;
    if (n < static_cast<std::size_t>(per_section)) {
      throw Error(ErrorCode::kValidation, "insufficient gold elements for section " + section.str() + ": " +
                                              std::to_string(n) + " available, " + std::to_string(per_section) +
                                              " required");
    }
  }

  std::shared_ptr<FixtureStore> fixtures;
  if (mode != FetchMode::kLive) fixtures = std::make_shared<FixtureStore>(options.required("fixtures"));
  if (mode != FetchMode::kReplay) http = http_or_default(std::move(http), options);
  const auto user_agent = options.str("user_agent", std::string("geonace/") + kVersion);

  TileFetcher osm(tile_config(options, "osm", "https://tile.openstreetmap.org/{z}/{x}/{y}.png",
                              "Map data and tiles (c) OpenStreetMap contributors, ODbL"),
                  mode, http.get(), fixtures.get(), user_agent);
  TileFetcher satellite(
      tile_config(options, "satellite",
                  "https://server.arcgisonline.com/ArcGIS/rest/services/World_Imagery/MapServer/tile/{z}/{y}/{x}",
                  "Imagery (c) Esri and its data providers"),
      mode, http.get(), fixtures.get(), user_agent);
  SourceFetchConfig sc;
  sc.mode = mode;
  sc.http = http.get();
  sc.fixtures = fixtures.get();
  sc.user_agent = user_agent;
  sc.contact = options.str("contact");
  sc.retry = retry_policy(options);
  sc.politeness_delay_ms = static_cast<int>(options.integer("sources.delay_ms", 0));
  SourceFetcher sources(sc);

  const auto out = prepare_out(options);
  fs::remove_all(out / "images");
  fs::create_directories(out / "images");
  BuildContext ctx;
  ctx.out = out;
  ctx.osm = &osm;
  ctx.satellite = &satellite;
  ctx.sources = &sources;
  ctx.zoom.max_tiles = static_cast<int>(options.integer("zoom.max_tiles", ctx.zoom.max_tiles));
  ctx.zoom.min_zoom = static_cast<int>(options.integer("zoom.min", ctx.zoom.min_zoom));
  ctx.zoom.max_zoom = static_cast<int>(options.integer("zoom.max", ctx.zoom.max_zoom));
  ctx.budget = static_cast<std::size_t>(options.integer("sources.budget", kDefaultSourceBudgetChars));
  ctx.diagnostics = &diagnostics;

  // Each section walks its seeded candidate order until it has enough
  // entries; sections are independent and run in parallel.
  std::vector<SectionCode> sections;
  for (const auto& [section, list] : candidates) sections.push_back(section);
  std::vector<std::vector<DatasetEntry>> picked(sections.size());
  std::vector<std::string> shortfall(sections.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(sections.size());
  auto worker = [&] {
    for (;;) {
      const auto i = next.fetch_add(1);
      if (i >= sections.size()) return;
      try {
        for (const auto& le : candidates[sections[i]]) {
          if (picked[i].size() == static_cast<std::size_t>(per_section)) break;
          if (auto entry = materialize(le, ctx)) picked[i].push_back(std::move(*entry));
        }
        if (picked[i].size() < static_cast<std::size_t>(per_section)) {
          shortfall[i] = fmt::format("section {}: {} usable of {} required", sections[i].str(), picked[i].size(),
                                     per_section);
        }
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (int w = 1; w < std::min<int>(workers, static_cast<int>(sections.size())); ++w) pool.emplace_back(worker);
    worker();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::string missing;
  for (const auto& s : shortfall) {
    if (!s.empty()) missing += (missing.empty() ? "" : "; ") + s;
  }
  if (!missing.empty()) throw Error(ErrorCode::kValidation, "insufficient gold elements after retrieval: " + missing);

  Dataset dataset;
  dataset.manifest.name = options.str("dataset.name", "geonace");
  dataset.manifest.version = options.str("dataset.version", "0");
  dataset.manifest.created_at = utc_now();
  dataset.manifest.attributions = {osm.config().attribution, satellite.config().attribution,
                                   "Wikidata (CC0)", "Wikipedia (CC BY-SA 4.0)"};
  for (auto& list : picked) {
    for (auto& e : list) dataset.entries.push_back(std::move(e));
  }
  manifest.inputs["elements"] = digest_path(elements_path);
  manifest.inputs["mapping"] = digest_path(mapping_path);
  dataset.manifest.run = manifest.to_json();
  write_dataset(dataset, out);
  if (diagnostics.size() > 0) {
    diagnostics.write_jsonl((out / "diagnostics.jsonl").string());
  } else {
    fs::remove(out / "diagnostics.jsonl");
  }
  return {out, fmt::format("{} entries from {} elements ({} labeled)", dataset.entries.size(), elements.size(),
                           labeled.size())};
}

// --- classify --------------------------------------------------------------

CommandResult cmd_classify(const Options& options, Diagnostics& diagnostics, std::shared_ptr<HttpClient> http) {
  options.check_keys("classify", command_keys("classify"));
  auto manifest = start_manifest("classify", options);
  const fs::path dataset_dir = options.required("dataset");
  const auto dataset = read_dataset(dataset_dir);
  const auto taxonomy = load_taxonomy(options);
  const auto mode = fetch_mode(options);

  RunConfig rc;
  const auto pick = [&](const std::string& key, const std::string& fallback, auto parse) {
    const auto text = options.str(key, fallback);
    const auto value = parse(text);
    if (!value) throw Error(ErrorCode::kInvalidArgument, "invalid " + key + " '" + text + "'");
    return *value;
  };
  rc.pipeline = pick("pipeline", "zero_shot", parse_pipeline);
  rc.selection = pick("input", "all", parse_input_selection);
  rc.tmpl.variant = pick("variant", "simple", parse_prompt_variant);
  rc.tmpl.output_mode = pick("output_mode", "text", parse_output_mode);
  rc.workers = worker_count(options);
  rc.max_tokens = static_cast<int>(options.integer("gateway.max_tokens", rc.max_tokens));
  rc.clue_max_tokens = static_cast<int>(options.integer("gateway.clue_max_tokens", rc.clue_max_tokens));

  GatewayConfig gc;
  gc.model = options.required("gateway.model");
  gc.temperature = options.real("gateway.temperature", 0.0);
  gc.api_key_env = options.str("gateway.key_env", gc.api_key_env);
  gc.retry = retry_policy(options);
  std::shared_ptr<Gateway> live;
  if (mode != FetchMode::kReplay) {
    gc.url = options.required("gateway.url");
    live = std::make_shared<HttpGateway>(gc, http_or_default(std::move(http), options));
  }
  std::shared_ptr<Gateway> gateway = live;
  if (mode != FetchMode::kLive) {
    auto store = std::make_shared<FixtureStore>(options.required("transcripts"));
    gateway = std::make_shared<TranscriptGateway>(mode, store, live, gc.model, gc.temperature, &diagnostics);
  }

  const auto out = prepare_out(options);
  manifest.inputs["dataset"] = digest_path(dataset_dir);
  const auto records = run_pipeline(dataset, dataset_dir, rc, taxonomy, *gateway, out / "records.jsonl", &diagnostics);
  const auto failed = std::count_if(records.begin(), records.end(), [](const auto& r) { return r.failed; });
  finish(out, manifest, diagnostics);
  return {out, fmt::format("{} records, {} failed", records.size(), failed)};
}

// --- score -----------------------------------------------------------------

CommandResult cmd_score(const Options& options, Diagnostics& diagnostics) {
  options.check_keys("score", command_keys("score"));
  auto manifest = start_manifest("score", options);
  fs::path records_path = options.required("records");
  if (fs::is_directory(records_path)) records_path /= "records.jsonl";
  const fs::path dataset_dir = options.required("dataset");
  const auto records = read_records(records_path);
  if (records.empty()) throw Error(ErrorCode::kValidation, "no records in " + records_path.string());
  const auto dataset = read_dataset(dataset_dir);
  const auto taxonomy = load_taxonomy(options);
  const auto report = score(records, dataset, taxonomy, &diagnostics);

  const auto out = prepare_out(options);
  const auto text = render_report(report);
  str::write_file((out / "report.txt").string(), text);
  str::write_file((out / "report.json").string(), report_to_json(report).dump(2) + "\n");
  str::write_file((out / "sources.csv").string(), render_source_csv(report));
  manifest.inputs["records"] = digest_path(records_path);
  manifest.inputs["dataset"] = digest_path(dataset_dir);
  finish(out, manifest, diagnostics);
  return {out, text};
}

// --- summarize -------------------------------------------------------------

CommandResult cmd_summarize(const Options& options, Diagnostics& diagnostics) {
  options.check_keys("summarize", command_keys("summarize"));
  const fs::path dataset_dir = options.required("dataset");
  const auto summary = summarize(read_dataset(dataset_dir));
  const auto text = render_summary(summary);
  if (!options.has("out")) return {{}, text};
  auto manifest = start_manifest("summarize", options);
  const auto out = prepare_out(options);
  str::write_file((out / "summary.json").string(), summary_to_json(summary).dump(2) + "\n");
  str::write_file((out / "summary.txt").string(), text);
  manifest.inputs["dataset"] = digest_path(dataset_dir);
  finish(out, manifest, diagnostics);
  return {out, text};
}

}  // namespace geonace
