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

/// @file pipeline.hpp
/// @brief End-to-end commands: catalog -> index, index -> evaluation files.
///
/// Every command is a pure function of its inputs, configuration and seed.
/// Per-slide randomness is derived from the run seed and the slide id, so
/// neither thread count nor catalog order changes a slide's mosaic.

#ifndef BOBSEARCH_PIPELINE_HPP_
#define BOBSEARCH_PIPELINE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bobsearch/corpus.hpp"
#include "bobsearch/eval.hpp"
#include "bobsearch/features.hpp"
#include "bobsearch/index.hpp"
#include "bobsearch/preprocess.hpp"

namespace bob {

inline constexpr const char* kReferenceFeatures = "reference";

struct RunConfig {
  /// magnification_mpp is ignored: each slide uses its catalog mpp.
  PatchSpec patch;
  int brightness_threshold = kDefaultBrightnessThreshold;
  int k = 9;
  double selection_fraction = 0.15;
  /// "reference" for the built-in extractor, otherwise a feature CSV path.
  std::string features = kReferenceFeatures;
  /// Mandatory; there is no entropy default.
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;

  /// Throws kInvalidArgument on a missing seed or out-of-range field.
  void validate() const;
};

/// Recognised keys mirror the field names: patch_size_um,
/// min_tissue_fraction, brightness_threshold, k, selection_fraction,
/// features, seed, threads. Unknown keys raise kSchema.
void apply_config_json(const nlohmann::json& j, RunConfig& config);
/// Overlays a JSON config file onto `config`; absent keys keep their values.
void apply_config_file(const std::filesystem::path& path, RunConfig& config);

nlohmann::json config_to_json(const RunConfig& config);

struct SlideIndexResult {
  BunchOfBarcodes bunch;
  Mosaic mosaic;
  std::size_t tissue_patch_count = 0;
};

/// Mosaic + reference features + MinMax barcodes for one slide image.
/// Throws kEmptyInput when the slide yields no tissue patch.
SlideIndexResult index_slide(const SlideRecord& record, ImageView image,
                             const RunConfig& config);

/// Groups imported feature vectors into bunches. Throws kDimension when
/// widths differ.
std::map<std::string, BunchOfBarcodes> bunches_from_features(
    std::span<const FeatureVector> vectors);

struct IndexBuild {
  Index index;
  std::vector<Mosaic> mosaics;  // empty for imported features
  nlohmann::json manifest_json() const;

  RunConfig config;
  std::vector<std::size_t> tissue_patch_counts;  // parallel to entries
};

/// Relative image paths are resolved against `base_dir`; a feature file path
/// is used as given.
/// Errors carry the offending slide id.
IndexBuild build_catalog_index(const Catalog& catalog,
                               const std::filesystem::path& base_dir,
                               const RunConfig& config);

/// Writes the index and, when non-empty, the manifest JSON and one mosaic
/// JSON per slide into `mosaic_dir`.
IndexBuild cmd_index(const std::filesystem::path& catalog_path,
                     const RunConfig& config,
                     const std::filesystem::path& index_path,
                     const std::filesystem::path& manifest_path = {},
                     const std::filesystem::path& mosaic_dir = {});

/// `count` distinct slide ids drawn with `seed`, returned in index order.
std::vector<std::string> sample_slide_ids(const Index& index,
                                          std::size_t count,
                                          std::uint64_t seed);

void write_pairwise_csv(std::ostream& out, std::span<const std::string> ids,
                        const std::vector<std::vector<double>>& distances);

/// Two-column CSV "subtype_code,group".
std::map<std::string, std::string> load_grouping(
    const std::filesystem::path& path);

struct EvaluateOutputs {
  /// When set, a pairwise-distance matrix of this many sampled slides is
  /// written as pairwise.csv.
  std::optional<std::size_t> pairwise_sample;
  std::uint64_t seed = 0;
  /// n for the confusion, heatmap and chord matrices.
  std::size_t matrix_n = 10;
};

/// Writes report.csv, report_full.csv, summary.csv, confusion.csv,
/// heatmap.csv, chord.csv and optionally pairwise.csv into `out_dir`.
Evaluation cmd_evaluate(const Index& index, const EvalConfig& config,
                        const std::filesystem::path& out_dir,
                        const EvaluateOutputs& outputs = {});

}  // namespace bob

#endif  // BOBSEARCH_PIPELINE_HPP_
