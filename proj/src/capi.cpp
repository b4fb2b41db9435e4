// Copyright 2026 The bobsearch Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bobsearch/bobsearch.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bobsearch/corpus.hpp"
#include "bobsearch/error.hpp"
#include "bobsearch/eval.hpp"
#include "bobsearch/index.hpp"
#include "bobsearch/pipeline.hpp"
#include "bobsearch/synth.hpp"

struct bob_index {
  bob::Index index;
};

struct bob_hits {
  std::vector<bob::SearchHit> hits;
};

namespace {

thread_local std::string g_last_error;
thread_local std::string g_config_features;

bob_status to_status(bob::ErrorCode code) {
  using bob::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return BOB_ERR_INVALID_ARGUMENT;
    case ErrorCode::kIo:
      return BOB_ERR_IO;
    case ErrorCode::kSchema:
      return BOB_ERR_SCHEMA;
    case ErrorCode::kDuplicateId:
      return BOB_ERR_DUPLICATE_ID;
    case ErrorCode::kValue:
      return BOB_ERR_VALUE;
    case ErrorCode::kEmptyCatalog:
      return BOB_ERR_EMPTY_CATALOG;
    case ErrorCode::kEmptyImage:
      return BOB_ERR_EMPTY_IMAGE;
    case ErrorCode::kEmptyInput:
      return BOB_ERR_EMPTY_INPUT;
    case ErrorCode::kDimension:
      return BOB_ERR_DIMENSION;
    case ErrorCode::kMissingSlide:
      return BOB_ERR_MISSING_SLIDE;
    case ErrorCode::kFormat:
      return BOB_ERR_FORMAT;
    case ErrorCode::kCorruptIndex:
      return BOB_ERR_CORRUPT_INDEX;
    case ErrorCode::kNotFound:
      return BOB_ERR_NOT_FOUND;
    case ErrorCode::kDivision:
      return BOB_ERR_DIVISION;
    case ErrorCode::kUndefinedCorrelation:
      return BOB_ERR_UNDEFINED_CORRELATION;
    case ErrorCode::kDegenerateSequence:
      return BOB_ERR_DEGENERATE_SEQUENCE;
  }
  return BOB_ERR_INTERNAL;
}

template <typename Fn>
bob_status guarded(Fn&& fn) {
  try {
    fn();
    return BOB_OK;
  } catch (const bob::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return BOB_ERR_OUT_OF_MEMORY;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return BOB_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return BOB_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) bob::fail(bob::ErrorCode::kInvalidArgument, what);
}

bob::RunConfig to_config(const bob_index_options& o) {
  bob::RunConfig c;
  c.patch.physical_size_um = o.patch_size_um;
  c.patch.min_tissue_fraction = o.min_tissue_fraction;
  c.brightness_threshold = o.brightness_threshold;
  c.k = o.k;
  c.selection_fraction = o.selection_fraction;
  c.features = o.features ? o.features : bob::kReferenceFeatures;
  if (o.has_seed) c.seed = o.seed;
  c.threads = o.threads;
  return c;
}

std::optional<bob::SectionType> to_section_type(bob_section s) {
  switch (s) {
    case BOB_SECTION_ALL:
      return std::nullopt;
    case BOB_SECTION_FROZEN:
      return bob::SectionType::kFrozen;
    case BOB_SECTION_PERMANENT:
      return bob::SectionType::kPermanent;
  }
  bob::fail(bob::ErrorCode::kInvalidArgument, "unknown section filter");
}

bob::SectionFilter to_section_filter(bob_section s) {
  switch (s) {
    case BOB_SECTION_ALL:
      return bob::SectionFilter::kAll;
    case BOB_SECTION_FROZEN:
      return bob::SectionFilter::kFrozen;
    case BOB_SECTION_PERMANENT:
      return bob::SectionFilter::kPermanent;
  }
  bob::fail(bob::ErrorCode::kInvalidArgument, "unknown section filter");
}

bob::Scope to_scope(bob_scope s) {
  switch (s) {
    case BOB_SCOPE_HORIZONTAL:
      return bob::Scope::kHorizontal;
    case BOB_SCOPE_VERTICAL:
      return bob::Scope::kVertical;
  }
  bob::fail(bob::ErrorCode::kInvalidArgument, "unknown scope");
}

}  // namespace

extern "C" {

const char* bob_status_name(bob_status status) {
  switch (status) {
    case BOB_OK:
      return "Ok";
    case BOB_ERR_OUT_OF_MEMORY:
      return "OutOfMemory";
    case BOB_ERR_INTERNAL:
      return "InternalError";
    default:
      break;
  }
  const int value = static_cast<int>(status);
  if (value >= BOB_ERR_INVALID_ARGUMENT &&
      value <= BOB_ERR_DEGENERATE_SEQUENCE) {
    // ErrorCode enumerators follow the status values in the same order.
    return bob::to_string(static_cast<bob::ErrorCode>(value - 1)).data();
  }
  return "Unknown";
}

const char* bob_last_error_message(void) { return g_last_error.c_str(); }

const char* bob_version(void) { return BOBSEARCH_VERSION_STRING; }

void bob_index_options_init(bob_index_options* options) {
  if (!options) return;
  const bob::RunConfig defaults;
  *options = {};
  options->patch_size_um = defaults.patch.physical_size_um;
  options->min_tissue_fraction = defaults.patch.min_tissue_fraction;
  options->brightness_threshold = defaults.brightness_threshold;
  options->k = defaults.k;
  options->selection_fraction = defaults.selection_fraction;
  options->features = bob::kReferenceFeatures;
  options->threads = defaults.threads;
}

bob_status bob_index_options_load_config(bob_index_options* options,
                                         const char* config_path) {
  return guarded([&] {
    require(options && config_path, "options and config path are required");
    bob::RunConfig config = to_config(*options);
    bob::apply_config_file(config_path, config);
    g_config_features = config.features;
    options->patch_size_um = config.patch.physical_size_um;
    options->min_tissue_fraction = config.patch.min_tissue_fraction;
    options->brightness_threshold = config.brightness_threshold;
    options->k = config.k;
    options->selection_fraction = config.selection_fraction;
    options->features = g_config_features.c_str();
    if (config.seed) {
      options->seed = *config.seed;
      options->has_seed = 1;
    }
    options->threads = config.threads;
  });
}

bob_status bob_build_index(const char* catalog_path,
                           const bob_index_options* options,
                           const char* index_path, const char* manifest_path) {
  return guarded([&] {
    require(catalog_path && options && index_path,
            "catalog path, options and index path are required");
    bob::cmd_index(catalog_path, to_config(*options), index_path,
                   manifest_path ? manifest_path : "",
                   options->mosaic_dir ? options->mosaic_dir : "");
  });
}

bob_status bob_index_open(const char* index_path, bob_index** out) {
  return guarded([&] {
    require(index_path && out, "index path and output handle are required");
    *out = nullptr;
    auto handle = std::make_unique<bob_index>();
    handle->index = bob::load_index(index_path);
    *out = handle.release();
  });
}

void bob_index_close(bob_index* index) { delete index; }

size_t bob_index_entry_count(const bob_index* index) {
  return index ? index->index.size() : 0;
}

size_t bob_index_barcode_count(const bob_index* index) {
  return index ? index->index.total_barcodes() : 0;
}

uint32_t bob_index_barcode_width(const bob_index* index) {
  return index ? index->index.width() : 0;
}

void bob_search_options_init(bob_search_options* options) {
  if (!options) return;
  *options = {};
  options->scope = BOB_SCOPE_HORIZONTAL;
  options->section = BOB_SECTION_ALL;
  options->threads = 1;
}

bob_status bob_search(const bob_index* index, const char* slide_id, size_t n,
                      const bob_search_options* options, bob_hits** out) {
  return guarded([&] {
    require(index && slide_id && out, "index, slide id and output required");
    *out = nullptr;
    bob_search_options defaults;
    bob_search_options_init(&defaults);
    const bob_search_options& o = options ? *options : defaults;
    bob::SearchOptions search;
    search.scope = to_scope(o.scope);
    search.site = o.site ? o.site : "";
    search.section = to_section_type(o.section);
    search.threads = o.threads;
    auto hits = std::make_unique<bob_hits>();
    hits->hits = bob::search(index->index, slide_id, n, search);
    *out = hits.release();
  });
}

size_t bob_hits_count(const bob_hits* hits) {
  return hits ? hits->hits.size() : 0;
}

bob_status bob_hits_get(const bob_hits* hits, size_t i, bob_hit* out) {
  return guarded([&] {
    require(hits && out, "hits and output are required");
    if (i >= hits->hits.size()) {
      bob::fail(bob::ErrorCode::kInvalidArgument, "hit index out of range");
    }
    const bob::SearchHit& h = hits->hits[i];
    *out = {h.slide_id.c_str(), h.subtype_code.c_str(), h.patient_id.c_str(),
            h.distance};
  });
}

void bob_hits_free(bob_hits* hits) { delete hits; }

void bob_eval_options_init(bob_eval_options* options) {
  if (!options) return;
  *options = {};
  options->scope = BOB_SCOPE_HORIZONTAL;
  options->section = BOB_SECTION_ALL;
  options->threads = 1;
  options->matrix_n = 10;
}

bob_status bob_evaluate(const bob_index* index,
                        const bob_eval_options* options, const char* out_dir) {
  return guarded([&] {
    require(index && options && out_dir, "index, options and out dir required");
    bob::EvalConfig config;
    config.scope = to_scope(options->scope);
    config.section = to_section_filter(options->section);
    if (options->ns) {
      config.ns.assign(options->ns, options->ns + options->ns_count);
    }
    if (options->grouping_path && *options->grouping_path) {
      config.grouping = bob::load_grouping(options->grouping_path);
    }
    config.threads = options->threads;
    bob::EvaluateOutputs outputs;
    if (options->pairwise_sample > 0) {
      outputs.pairwise_sample = options->pairwise_sample;
    }
    outputs.seed = options->seed;
    outputs.matrix_n = options->matrix_n;
    bob::cmd_evaluate(index->index, config, out_dir, outputs);
  });
}

bob_status bob_export_pairwise(const bob_index* index,
                               const char* const* slide_ids,
                               size_t slide_id_count, size_t sample,
                               uint64_t seed, const char* out_path) {
  return guarded([&] {
    require(index && out_path, "index and output path are required");
    std::vector<std::string> ids;
    if (slide_ids) {
      for (size_t i = 0; i < slide_id_count; ++i) {
        require(slide_ids[i] != nullptr, "null slide id");
        ids.emplace_back(slide_ids[i]);
      }
    } else {
      require(sample > 0, "sample size must be > 0");
      ids = bob::sample_slide_ids(index->index, sample, seed);
    }
    const auto distances = bob::pairwise_distances(index->index, ids);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      bob::fail(bob::ErrorCode::kIo, std::string("cannot open ") + out_path);
    }
    bob::write_pairwise_csv(out, ids, distances);
    out.flush();
    if (!out) {
      bob::fail(bob::ErrorCode::kIo, std::string("cannot write ") + out_path);
    }
  });
}

bob_status bob_catalog_stats(const char* catalog_path, char** csv_out) {
  return guarded([&] {
    require(catalog_path && csv_out, "catalog path and output are required");
    *csv_out = nullptr;
    std::ostringstream out;
    bob::write_stats_csv(out,
                         bob::catalog_stats(bob::load_catalog(catalog_path)));
    const std::string text = out.str();
    char* buffer = static_cast<char*>(std::malloc(text.size() + 1));
    if (!buffer) throw std::bad_alloc();
    std::memcpy(buffer, text.c_str(), text.size() + 1);
    *csv_out = buffer;
  });
}

void bob_string_free(char* text) { std::free(text); }

void bob_synth_options_init(bob_synth_options* options) {
  if (!options) return;
  *options = {};
  options->kind = BOB_SYNTH_IMAGES;
  options->subtypes = 3;
  options->subtypes_per_site = 2;
  options->patients_per_subtype = 10;
  options->max_slides_per_patient = 1;
  options->image_format = "png";
  options->patches_per_slide = 40;
  options->dim = bob::kReferenceDim;
}

bob_status bob_synth_corpus(const bob_synth_options* options,
                            const char* out_dir) {
  return guarded([&] {
    require(options && out_dir, "options and output directory are required");
    bob::CatalogSpec catalog;
    catalog.subtypes =
        bob::simple_subtypes(options->subtypes, options->subtypes_per_site,
                             options->patients_per_subtype);
    catalog.max_slides_per_patient = options->max_slides_per_patient;
    catalog.seed = options->seed;
    switch (options->kind) {
      case BOB_SYNTH_IMAGES: {
        const std::string format =
            options->image_format ? options->image_format : "png";
        if (format != "png" && format != "tiff") {
          bob::fail(bob::ErrorCode::kInvalidArgument,
                    "image format must be png or tiff");
        }
        catalog.image_extension = format == "png" ? ".png" : ".tif";
        bob::write_image_corpus(out_dir, catalog);
        return;
      }
      case BOB_SYNTH_FEATURES: {
        bob::FeatureCorpusSpec spec;
        spec.catalog = catalog;
        spec.patches_per_slide = options->patches_per_slide;
        spec.dim = options->dim;
        spec.seed = options->seed;
        bob::write_feature_corpus(out_dir, spec);
        return;
      }
    }
    bob::fail(bob::ErrorCode::kInvalidArgument, "unknown synth kind");
  });
}

}  // extern "C"
