/* Copyright 2026 The bobsearch Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the bobsearch library.
 *
 * Every fallible call returns a bob_status. On failure the message of the
 * most recent error on the calling thread is available from
 * bob_last_error_message() until the next failing call on that thread.
 * Handles are opaque; pass them back to the matching free/close function.
 * Strings handed out by the library stay valid for the lifetime of the
 * object that owns them. */

#ifndef BOBSEARCH_BOBSEARCH_H_
#define BOBSEARCH_BOBSEARCH_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(BOBSEARCH_BUILDING_LIBRARY)
#define BOB_API __declspec(dllexport)
#else
#define BOB_API __declspec(dllimport)
#endif
#else
#define BOB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

#define BOBSEARCH_VERSION_STRING "1.0.0"

typedef enum bob_status {
  BOB_OK = 0,
  BOB_ERR_INVALID_ARGUMENT = 1,
  BOB_ERR_IO = 2,
  BOB_ERR_SCHEMA = 3,
  BOB_ERR_DUPLICATE_ID = 4,
  BOB_ERR_VALUE = 5,
  BOB_ERR_EMPTY_CATALOG = 6,
  BOB_ERR_EMPTY_IMAGE = 7,
  BOB_ERR_EMPTY_INPUT = 8,
  BOB_ERR_DIMENSION = 9,
  BOB_ERR_MISSING_SLIDE = 10,
  BOB_ERR_FORMAT = 11,
  BOB_ERR_CORRUPT_INDEX = 12,
  BOB_ERR_NOT_FOUND = 13,
  BOB_ERR_DIVISION = 14,
  BOB_ERR_UNDEFINED_CORRELATION = 15,
  BOB_ERR_DEGENERATE_SEQUENCE = 16,
  BOB_ERR_OUT_OF_MEMORY = 17,
  BOB_ERR_INTERNAL = 18
} bob_status;

typedef enum bob_scope { BOB_SCOPE_HORIZONTAL = 0, BOB_SCOPE_VERTICAL = 1 } bob_scope;

typedef enum bob_section {
  BOB_SECTION_ALL = 0,
  BOB_SECTION_FROZEN = 1,
  BOB_SECTION_PERMANENT = 2
} bob_section;

/* Stable identifier such as "CorruptIndex"; "Unknown" for bad values. */
BOB_API const char* bob_status_name(bob_status status);
/* Empty string when no error has occurred on this thread. */
BOB_API const char* bob_last_error_message(void);
BOB_API const char* bob_version(void);

/* ---- Indexing ---------------------------------------------------------- */

typedef struct bob_index_options {
  double patch_size_um;        /* physical patch side, default 500 */
  double min_tissue_fraction;  /* default 0.5 */
  int brightness_threshold;    /* default 220 */
  int k;                       /* clusters per slide, default 9 */
  double selection_fraction;   /* default 0.15 */
  const char* features;        /* "reference" (default) or feature CSV path */
  uint64_t seed;
  int has_seed;                /* a seed is required; nonzero when set */
  unsigned threads;            /* default 1; never changes results */
  const char* mosaic_dir;      /* optional; per-slide mosaic JSON output */
} bob_index_options;

BOB_API void bob_index_options_init(bob_index_options* options);

/* Overlays a JSON config file onto `options`. Strings read from the file
 * are owned by the library and stay valid until the next call on this
 * thread. */
BOB_API bob_status bob_index_options_load_config(bob_index_options* options,
                                                 const char* config_path);

/* Builds an index from a catalog CSV. manifest_path may be NULL. */
BOB_API bob_status bob_build_index(const char* catalog_path,
                                   const bob_index_options* options,
                                   const char* index_path,
                                   const char* manifest_path);

typedef struct bob_index bob_index;

BOB_API bob_status bob_index_open(const char* index_path, bob_index** out);
BOB_API void bob_index_close(bob_index* index);
BOB_API size_t bob_index_entry_count(const bob_index* index);
BOB_API size_t bob_index_barcode_count(const bob_index* index);
BOB_API uint32_t bob_index_barcode_width(const bob_index* index);

/* ---- Search ------------------------------------------------------------ */

typedef struct bob_search_options {
  bob_scope scope;
  const char* site;     /* vertical only; NULL or "" = query's own site */
  bob_section section;  /* candidate filter */
  unsigned threads;
} bob_search_options;

BOB_API void bob_search_options_init(bob_search_options* options);

typedef struct bob_hit {
  const char* slide_id;
  const char* subtype_code;
  const char* patient_id;
  double distance;
} bob_hit;

typedef struct bob_hits bob_hits;

/* options may be NULL for defaults. */
BOB_API bob_status bob_search(const bob_index* index, const char* slide_id,
                              size_t n, const bob_search_options* options,
                              bob_hits** out);
BOB_API size_t bob_hits_count(const bob_hits* hits);
BOB_API bob_status bob_hits_get(const bob_hits* hits, size_t i, bob_hit* out);
BOB_API void bob_hits_free(bob_hits* hits);

/* ---- Evaluation -------------------------------------------------------- */

typedef struct bob_eval_options {
  bob_scope scope;
  bob_section section;
  const size_t* ns;  /* NULL = 3, 5, 7, 10, 15, 20 */
  size_t ns_count;
  const char* grouping_path;  /* optional "subtype_code,group" CSV */
  unsigned threads;
  size_t pairwise_sample;  /* 0 = no pairwise.csv */
  uint64_t seed;           /* drives the pairwise sample */
  size_t matrix_n;         /* hits per query in matrices, default 10 */
} bob_eval_options;

BOB_API void bob_eval_options_init(bob_eval_options* options);

/* Writes the report and matrix CSV files into out_dir. */
BOB_API bob_status bob_evaluate(const bob_index* index,
                                const bob_eval_options* options,
                                const char* out_dir);

/* Pairwise BoB distances as CSV. Uses `slide_ids` when non-NULL, otherwise
 * `sample` slides drawn with `seed`. */
BOB_API bob_status bob_export_pairwise(const bob_index* index,
                                       const char* const* slide_ids,
                                       size_t slide_id_count, size_t sample,
                                       uint64_t seed, const char* out_path);

/* ---- Catalog and demo data --------------------------------------------- */

/* Per-subtype statistics CSV; free the result with bob_string_free. */
BOB_API bob_status bob_catalog_stats(const char* catalog_path, char** csv_out);
BOB_API void bob_string_free(char* text);

typedef enum bob_synth_kind {
  BOB_SYNTH_IMAGES = 0,
  BOB_SYNTH_FEATURES = 1
} bob_synth_kind;

typedef struct bob_synth_options {
  bob_synth_kind kind;
  size_t subtypes;                /* default 3 */
  size_t subtypes_per_site;       /* default 2 */
  size_t patients_per_subtype;    /* default 10 */
  size_t max_slides_per_patient;  /* default 1 */
  uint64_t seed;
  const char* image_format;       /* "png" (default) or "tiff" */
  size_t patches_per_slide;       /* features only, default 40 */
  size_t dim;                     /* features only, default 1024 */
} bob_synth_options;

BOB_API void bob_synth_options_init(bob_synth_options* options);

/* Writes catalog.csv plus images or features.csv into out_dir. */
BOB_API bob_status bob_synth_corpus(const bob_synth_options* options,
                                    const char* out_dir);

#ifdef __cplusplus
}
#endif

#endif /* BOBSEARCH_BOBSEARCH_H_ */
