// Copyright 2026 The geonace Authors
// SPDX-License-Identifier: Apache-2.0

#include "geonace/geonace.h"

#include <iterator>
#include <memory>
#include <string>
#include <vector>

#include "geonace/dataset.hpp"
#include "geonace/inference.hpp"
#include "geonace/workflow.hpp"

struct geonace_options {
  geonace::Options options;
  std::string json;
};

struct geonace_result {
  std::string summary;
  std::string out_dir;
  std::vector<geonace::Diagnostic> diagnostics;
};

struct geonace_dataset {
  geonace::Dataset dataset;
};

namespace {

thread_local std::string last_error;

geonace_status status_for(geonace::ErrorCode code) {
  using geonace::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidArgument: return GEONACE_E_INVALID_ARGUMENT;
    case ErrorCode::kIo: return GEONACE_E_IO;
    case ErrorCode::kValidation: return GEONACE_E_VALIDATION;
    case ErrorCode::kParse: return GEONACE_E_PARSE;
    case ErrorCode::kDomain: return GEONACE_E_DOMAIN;
    case ErrorCode::kFetch: return GEONACE_E_FETCH;
    case ErrorCode::kUnsupportedContent: return GEONACE_E_UNSUPPORTED_CONTENT;
    case ErrorCode::kCorruptTile: return GEONACE_E_CORRUPT_TILE;
    case ErrorCode::kGateway: return GEONACE_E_GATEWAY;
    case ErrorCode::kNotFound: return GEONACE_E_NOT_FOUND;
    case ErrorCode::kLeak: return GEONACE_E_LEAK;
    case ErrorCode::kInternal: return GEONACE_E_INTERNAL;
  }
  return GEONACE_E_INTERNAL;
}

geonace_status fail(geonace_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

template <typename F>
geonace_status guarded(F&& f) {
  try {
    last_error.clear();
    f();
    return GEONACE_OK;
  } catch (const geonace::Error& e) {
    return fail(status_for(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(GEONACE_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(GEONACE_E_INTERNAL, e.what());
  } catch (...) {
    return fail(GEONACE_E_INTERNAL, "unknown exception");
  }
}

}  // namespace

extern "C" {

const char* geonace_version(void) { return geonace::kVersion; }

const char* geonace_status_name(geonace_status status) {
  switch (status) {
    case GEONACE_OK: return "ok";
    case GEONACE_E_INVALID_ARGUMENT: return "invalid_argument";
    case GEONACE_E_IO: return "io";
    case GEONACE_E_VALIDATION: return "validation";
    case GEONACE_E_PARSE: return "parse";
    case GEONACE_E_DOMAIN: return "domain";
    case GEONACE_E_FETCH: return "fetch";
    case GEONACE_E_UNSUPPORTED_CONTENT: return "unsupported_content";
    case GEONACE_E_CORRUPT_TILE: return "corrupt_tile";
    case GEONACE_E_GATEWAY: return "gateway";
    case GEONACE_E_NOT_FOUND: return "not_found";
    case GEONACE_E_LEAK: return "leak";
    case GEONACE_E_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* geonace_last_error(void) { return last_error.c_str(); }

geonace_options* geonace_options_new(void) {
  try {
    return new geonace_options();
  } catch (...) {
    last_error = "out of memory";
    return nullptr;
  }
}

void geonace_options_free(geonace_options* options) { delete options; }

geonace_status geonace_options_set(geonace_options* options, const char* key, const char* value) {
  if (!options || !key || !value) return fail(GEONACE_E_INVALID_ARGUMENT, "null argument");
  if (!*key) return fail(GEONACE_E_INVALID_ARGUMENT, "empty key");
  return guarded([&] { options->options.set(key, value); });
}

const char* geonace_options_json(geonace_options* options) {
  if (!options) return "";
  try {
    options->json = nlohmann::json(options->options.values()).dump();
  } catch (...) {
    options->json = "{}";
  }
  return options->json.c_str();
}

geonace_status geonace_run(const char* command, const geonace_options* options, geonace_result** out) {
  if (out) *out = nullptr;
  if (!command || !options) return fail(GEONACE_E_INVALID_ARGUMENT, "null argument");
  geonace::Diagnostics diagnostics;
  geonace::CommandResult result;
  const std::string cmd = command;
  const auto status = guarded([&] {
    if (cmd == "map") {
      result = geonace::cmd_map(options->options, diagnostics);
    } else if (cmd == "build") {
      result = geonace::cmd_build(options->options, diagnostics);
    } else if (cmd == "classify") {
      result = geonace::cmd_classify(options->options, diagnostics);
    } else if (cmd == "score") {
      result = geonace::cmd_score(options->options, diagnostics);
    } else if (cmd == "summarize") {
      result = geonace::cmd_summarize(options->options, diagnostics);
    } else {
      throw geonace::Error(geonace::ErrorCode::kInvalidArgument, "unknown command '" + cmd + "'");
    }
  });
  if (out) {
    try {
      auto* r = new geonace_result();
      r->summary = result.summary;
      r->out_dir = result.out_dir.string();
      r->diagnostics = diagnostics.snapshot();
      *out = r;
    } catch (...) {
      return fail(GEONACE_E_INTERNAL, "out of memory");
    }
  }
  return status;
}

const char* geonace_command_key(const char* command, size_t index) {
  if (!command) return nullptr;
  try {
    const auto& keys = geonace::command_keys(command);
    if (index >= keys.size()) return nullptr;
    return std::next(keys.begin(), static_cast<std::ptrdiff_t>(index))->c_str();
  } catch (...) {
    return nullptr;
  }
}

const char* geonace_result_summary(const geonace_result* result) { return result ? result->summary.c_str() : ""; }

const char* geonace_result_out_dir(const geonace_result* result) { return result ? result->out_dir.c_str() : ""; }

size_t geonace_result_diagnostic_count(const geonace_result* result) { return result ? result->diagnostics.size() : 0; }

geonace_status geonace_result_diagnostic(const geonace_result* result, size_t index, const char** code,
                                         const char** subject, const char** message) {
  if (!result) return fail(GEONACE_E_INVALID_ARGUMENT, "null result");
  if (index >= result->diagnostics.size()) return fail(GEONACE_E_INVALID_ARGUMENT, "diagnostic index out of range");
  const auto& d = result->diagnostics[index];
  if (code) *code = d.code.c_str();
  if (subject) *subject = d.subject.c_str();
  if (message) *message = d.message.c_str();
  return GEONACE_OK;
}

void geonace_result_free(geonace_result* result) { delete result; }

geonace_status geonace_dataset_open(const char* dir, geonace_dataset** out) {
  if (!dir || !out) return fail(GEONACE_E_INVALID_ARGUMENT, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto handle = std::make_unique<geonace_dataset>();
    handle->dataset = geonace::read_dataset(dir);
    *out = handle.release();
  });
}

size_t geonace_dataset_size(const geonace_dataset* dataset) { return dataset ? dataset->dataset.entries.size() : 0; }

geonace_status geonace_dataset_entry(const geonace_dataset* dataset, size_t index, int64_t* id, char* category) {
  if (!dataset) return fail(GEONACE_E_INVALID_ARGUMENT, "null dataset");
  if (index >= dataset->dataset.entries.size()) return fail(GEONACE_E_INVALID_ARGUMENT, "entry index out of range");
  const auto& e = dataset->dataset.entries[index];
  if (id) *id = e.id;
  if (category) *category = e.category.letter();
  return GEONACE_OK;
}

void geonace_dataset_free(geonace_dataset* dataset) { delete dataset; }

const char* geonace_parse_label(const char* raw, size_t length, int json_mode) {
  static const char* const kLabels[] = {"A", "B", "C", "D", "E", "F", "G", "H", "I", "J", "K",
                                        "L", "M", "N", "O", "P", "Q", "R", "S", "T", "U"};
  const auto p = geonace::parse_prediction(raw ? std::string_view(raw, length) : std::string_view(),
                                           json_mode ? geonace::OutputMode::kJson : geonace::OutputMode::kText);
  switch (p.kind) {
    case geonace::Prediction::Kind::kSection: return kLabels[p.section->index()];
    case geonace::Prediction::Kind::kUnknown: return "UNK";
    case geonace::Prediction::Kind::kViolation: return "VIOLATION";
  }
  return "VIOLATION";
}

}  // extern "C"
