// Copyright 2026 The geonace Authors
// SPDX-License-Identifier: Apache-2.0

#include "geonace/pipeline.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "strings.hpp"

namespace geonace {

std::string call_key(const std::string& model_id, const RunConfig& config, std::int64_t entry_id,
                     const std::string& stage) {
  return model_id + "|" + std::string(to_string(config.pipeline)) + "|" + std::string(to_string(config.selection)) +
         "|" + std::string(to_string(config.tmpl.variant)) + "-" + std::string(to_string(config.tmpl.output_mode)) +
         "|" + std::to_string(entry_id) + "|" + stage;
}

nlohmann::json record_to_json(const InferenceRecord& r) {
  nlohmann::json clues = nlohmann::json::array();
  for (const auto& c : r.clues) clues.push_back({{"source", to_string(c.source)}, {"text", c.text}});
  nlohmann::json prediction = {{"label", r.prediction.label()}, {"raw", r.prediction.raw}};
  if (r.prediction.explanation) prediction["explanation"] = *r.prediction.explanation;
  nlohmann::json j = {{"schema_version", kRecordSchemaVersion},
                      {"entry_id", r.entry_id},
                      {"pipeline", to_string(r.pipeline)},
                      {"config", to_string(r.selection)},
                      {"template", {{"variant", to_string(r.tmpl.variant)}, {"output_mode", to_string(r.tmpl.output_mode)}}},
                      {"model_id", r.model_id},
                      {"clues", clues},
                      {"prediction", prediction},
                      {"failed", r.failed},
                      {"calls", r.calls},
                      {"usage", {{"prompt_tokens", r.prompt_tokens}, {"completion_tokens", r.completion_tokens}}}};
  if (r.failed) j["error"] = r.error;
  return j;
}

namespace {

template <typename T, typename Parse>
T parse_field(const nlohmann::json& j, const char* field, Parse parse) {
  if (!j.contains(field) || !j[field].is_string()) {
    throw Error(ErrorCode::kParse, std::string("record field '") + field + "' missing");
  }
  const auto value = parse(j[field].template get<std::string>());
  if (!value) throw Error(ErrorCode::kParse, std::string("record field '") + field + "' has unknown value");
  return *value;
}

Prediction prediction_from_json(const nlohmann::json& j) {
  Prediction p;
  p.raw = j.value("raw", "");
  const auto label = j.value("label", "VIOLATION");
  if (label == "UNK") {
    p.kind = Prediction::Kind::kUnknown;
  } else if (label.size() == 1 && SectionCode::from_letter(label[0])) {
    p.kind = Prediction::Kind::kSection;
    p.section = SectionCode::from_letter(label[0]);
  } else if (label != "VIOLATION") {
    throw Error(ErrorCode::kParse, "record prediction label '" + label + "' unknown");
  }
  if (j.contains("explanation") && j["explanation"].is_string()) p.explanation = j["explanation"].get<std::string>();
  return p;
}

}  // namespace

InferenceRecord record_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kParse, "record is not an object");
  if (j.value("schema_version", 0) != kRecordSchemaVersion) {
    throw Error(ErrorCode::kParse, "unsupported record schema_version");
  }
  InferenceRecord r;
  r.entry_id = j.at("entry_id").get<std::int64_t>();
  r.pipeline = parse_field<Pipeline>(j, "pipeline", parse_pipeline);
  r.selection = parse_field<InputSelection>(j, "config", parse_input_selection);
  const auto& t = j.at("template");
  r.tmpl.variant = parse_field<PromptVariant>(t, "variant", parse_prompt_variant);
  r.tmpl.output_mode = parse_field<OutputMode>(t, "output_mode", parse_output_mode);
  r.model_id = j.value("model_id", "");
  for (const auto& c : j.value("clues", nlohmann::json::array())) {
    r.clues.push_back({parse_field<ClueSource>(c, "source", parse_clue_source), c.value("text", "")});
  }
  r.prediction = prediction_from_json(j.at("prediction"));
  r.failed = j.value("failed", false);
  r.error = j.value("error", "");
  r.calls = j.value("calls", 0);
  if (j.contains("usage")) {
    r.prompt_tokens = j["usage"].value("prompt_tokens", std::int64_t{0});
    r.completion_tokens = j["usage"].value("completion_tokens", std::int64_t{0});
  }
  return r;
}

namespace {

struct ParsedRecords {
  std::vector<InferenceRecord> records;
  std::size_t valid_bytes = 0;  // prefix length holding complete lines
};

ParsedRecords parse_records(const std::string& text, const std::string& origin) {
  ParsedRecords out;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    ++line_no;
    const bool last = nl == std::string::npos;
    if (last) break;  // torn tail from an interrupted append
    const auto line = text.substr(pos, nl - pos);
    if (!str::trim(line).empty()) {
      const auto j = nlohmann::json::parse(line, nullptr, false);
      if (j.is_discarded()) throw Error(ErrorCode::kParse, origin + ":" + std::to_string(line_no) + ": not JSON");
      try {
        out.records.push_back(record_from_json(j));
      } catch (const std::exception& e) {
        throw Error(ErrorCode::kParse, origin + ":" + std::to_string(line_no) + ": " + e.what());
      }
    }
    pos = nl + 1;
    out.valid_bytes = pos;
  }
  return out;
}

class RecordWriter {
 public:
  explicit RecordWriter(const std::filesystem::path& path) : path_(path.string()) {
    fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd_ < 0) throw Error(ErrorCode::kIo, "cannot open " + path_ + ": " + std::strerror(errno));
  }
  ~RecordWriter() {
    if (fd_ >= 0) ::close(fd_);
  }
  RecordWriter(const RecordWriter&) = delete;
  RecordWriter& operator=(const RecordWriter&) = delete;

  void append(const InferenceRecord& record) {
    const auto line = record_to_json(record).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
    std::size_t done = 0;
    while (done < line.size()) {
      const auto n = ::write(fd_, line.data() + done, line.size() - done);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw Error(ErrorCode::kIo, "write " + path_ + ": " + std::strerror(errno));
      }
      done += static_cast<std::size_t>(n);
    }
    if (::fsync(fd_) != 0) throw Error(ErrorCode::kIo, "fsync " + path_ + ": " + std::strerror(errno));
  }

 private:
  std::string path_;
  int fd_ = -1;
};

void accumulate(InferenceRecord& r, const Completion& c) {
  ++r.calls;
  r.prompt_tokens += c.prompt_tokens;
  r.completion_tokens += c.completion_tokens;
  r.latency_ms += c.latency_ms;
}

}  // namespace

std::vector<InferenceRecord> read_records(const std::filesystem::path& path) {
  return parse_records(str::read_file(path.string()), path.string()).records;
}

InferenceRecord run_entry(const DatasetEntry& entry, const RunConfig& config, const Taxonomy& taxonomy,
                          Gateway& gateway, const std::filesystem::path& dataset_dir) {
  InferenceRecord r;
  r.entry_id = entry.id;
  r.pipeline = config.pipeline;
  r.selection = config.selection;
  r.tmpl = config.tmpl;
  r.model_id = gateway.model_id();
  const auto key = [&](const std::string& stage) { return call_key(r.model_id, config, entry.id, stage); };
  try {
    if (config.pipeline == Pipeline::kZeroShot) {
      ChatRequest req{build_zero_shot_prompt(entry, config.selection, config.tmpl, taxonomy), config.max_tokens,
                      dataset_dir};
      const auto c = gateway.complete(req, key("classify"));
      accumulate(r, c);
      r.prediction = parse_prediction(c.text, config.tmpl.output_mode);
      return r;
    }
    for (auto source : selected_resources(entry, config.selection)) {
      ChatRequest req{build_clue_prompt(source, clue_payload_for(entry, source), taxonomy), config.clue_max_tokens,
                      dataset_dir};
      const auto c = gateway.complete(req, key("clue:" + std::string(to_string(source))));
      accumulate(r, c);
      r.clues.push_back({source, c.text});
    }
    ChatRequest req{build_decision_prompt(entry.name, r.clues, config.tmpl, taxonomy), config.max_tokens,
                    dataset_dir};
    const auto c = gateway.complete(req, key("decision"));
    accumulate(r, c);
    r.prediction = parse_prediction(c.text, config.tmpl.output_mode);
  } catch (const Error& e) {
    r.failed = true;
    r.error = std::string(to_string(e.code())) + ": " + e.what();
    r.prediction = Prediction{};
  }
  return r;
}

std::vector<InferenceRecord> run_pipeline(const Dataset& dataset, const std::filesystem::path& dataset_dir,
                                          const RunConfig& config, const Taxonomy& taxonomy, Gateway& gateway,
                                          const std::filesystem::path& records_file, Diagnostics* diagnostics) {
  std::map<std::int64_t, InferenceRecord> done;
  if (std::filesystem::exists(records_file)) {
    const auto text = str::read_file(records_file.string());
    auto parsed = parse_records(text, records_file.string());
    std::string kept;
    for (auto& r : parsed.records) {
      if (!dataset.find(r.entry_id)) {
        throw Error(ErrorCode::kValidation, "records file has entry " + std::to_string(r.entry_id) +
                                                " that is not in the dataset");
      }
      if (r.failed || done.contains(r.entry_id)) continue;
      kept += record_to_json(r).dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
      done.emplace(r.entry_id, std::move(r));
    }
    if (parsed.valid_bytes != text.size() && diagnostics) {
      diagnostics->warn("torn_record", records_file.string(), "discarded a partial last line");
    }
    if (kept.size() != text.size()) {
      const auto tmp = records_file.string() + ".tmp";
      str::write_file(tmp, kept);
      std::filesystem::rename(tmp, records_file);
    }
  }

  std::vector<const DatasetEntry*> todo;
  for (const auto& e : dataset.entries) {
    if (!done.contains(e.id)) todo.push_back(&e);
  }

  RecordWriter writer(records_file);
  std::vector<std::optional<InferenceRecord>> slots(todo.size());
  std::size_t next_commit = 0;
  std::atomic<std::size_t> next_claim{0};
  std::mutex mu;
  std::exception_ptr write_error;

  auto worker = [&] {
    for (;;) {
      const auto i = next_claim.fetch_add(1);
      if (i >= todo.size()) return;
      auto record = run_entry(*todo[i], config, taxonomy, gateway, dataset_dir);
      if (record.failed && diagnostics) {
        diagnostics->warn("inference_failed", std::to_string(record.entry_id), record.error);
      }
      std::lock_guard lock(mu);
      slots[i] = std::move(record);
      // Commit in dataset order so the file is independent of scheduling.
      while (!write_error && next_commit < slots.size() && slots[next_commit]) {
        try {
          writer.append(*slots[next_commit]);
        } catch (...) {
          write_error = std::current_exception();
          next_claim = todo.size();
          return;
        }
        ++next_commit;
      }
    }
  };

  const int workers = std::max(1, std::min<int>(config.workers, static_cast<int>(std::max<std::size_t>(1, todo.size()))));
  {
    std::vector<std::jthread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }
  if (write_error) std::rethrow_exception(write_error);

  for (auto& slot : slots) {
    if (slot) done.emplace(slot->entry_id, std::move(*slot));
  }
  std::vector<InferenceRecord> out;
  for (const auto& e : dataset.entries) out.push_back(done.at(e.id));
  return out;
}

}  // namespace geonace
