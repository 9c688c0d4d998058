/* Copyright 2026 The geonace Authors
 * SPDX-License-Identifier: Apache-2.0 */

#ifndef GEONACE_GEONACE_H_
#define GEONACE_GEONACE_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define GEONACE_API __declspec(dllexport)
#else
#define GEONACE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum geonace_status {
  GEONACE_OK = 0,
  GEONACE_E_INVALID_ARGUMENT = 1,
  GEONACE_E_IO = 2,
  GEONACE_E_VALIDATION = 3,
  GEONACE_E_PARSE = 4,
  GEONACE_E_DOMAIN = 5,
  GEONACE_E_FETCH = 6,
  GEONACE_E_UNSUPPORTED_CONTENT = 7,
  GEONACE_E_CORRUPT_TILE = 8,
  GEONACE_E_GATEWAY = 9,
  GEONACE_E_NOT_FOUND = 10,
  GEONACE_E_LEAK = 11,
  GEONACE_E_INTERNAL = 12
} geonace_status;

typedef struct geonace_options geonace_options;
typedef struct geonace_result geonace_result;
typedef struct geonace_dataset geonace_dataset;

GEONACE_API const char* geonace_version(void);
GEONACE_API const char* geonace_status_name(geonace_status status);
/* Message of the last failed call on this thread; "" when none. */
GEONACE_API const char* geonace_last_error(void);

GEONACE_API geonace_options* geonace_options_new(void);
GEONACE_API void geonace_options_free(geonace_options* options);
GEONACE_API geonace_status geonace_options_set(geonace_options* options, const char* key, const char* value);
/* Effective settings as a JSON object; owned by `options`, valid until the next set. */
GEONACE_API const char* geonace_options_json(geonace_options* options);

/* Runs "map", "build", "classify", "score" or "summarize". When `out` is
 * non-null a result is stored there even on failure, so diagnostics gathered
 * before the error stay readable. Free it with geonace_result_free. */
GEONACE_API geonace_status geonace_run(const char* command, const geonace_options* options, geonace_result** out);

/* Settings accepted by `command`, one per index; NULL past the end or for an
 * unknown command. */
GEONACE_API const char* geonace_command_key(const char* command, size_t index);

GEONACE_API const char* geonace_result_summary(const geonace_result* result);
GEONACE_API const char* geonace_result_out_dir(const geonace_result* result);
GEONACE_API size_t geonace_result_diagnostic_count(const geonace_result* result);
GEONACE_API geonace_status geonace_result_diagnostic(const geonace_result* result, size_t index, const char** code,
                                                     const char** subject, const char** message);
GEONACE_API void geonace_result_free(geonace_result* result);

GEONACE_API geonace_status geonace_dataset_open(const char* dir, geonace_dataset** out);
GEONACE_API size_t geonace_dataset_size(const geonace_dataset* dataset);
GEONACE_API geonace_status geonace_dataset_entry(const geonace_dataset* dataset, size_t index, int64_t* id,
                                                 char* category);
GEONACE_API void geonace_dataset_free(geonace_dataset* dataset);

/* Classification label of a raw model response: "A".."U", "UNK" or
 * "VIOLATION". `json_mode` selects the JSON output contract. Never fails. */
GEONACE_API const char* geonace_parse_label(const char* raw, size_t length, int json_mode);

#ifdef __cplusplus
}
#endif

#endif /* GEONACE_GEONACE_H_ */
