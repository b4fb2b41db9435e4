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

/// @file synth.hpp
/// @brief Deterministic synthetic corpora for demos, tests and benchmarks.
///
/// Two generators are provided. The feature-level generator draws patch
/// feature vectors around per-subtype prototype vectors, optionally mixed
/// with prototypes shared by all subtypes, which controls class overlap.
/// The image-level generator paints slide rasters (white background, an
/// elliptical tissue region split into textured regions whose colours depend
/// on the subtype) for exercising the full preprocessing chain.

#ifndef BOBSEARCH_SYNTH_HPP_
#define BOBSEARCH_SYNTH_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "bobsearch/barcode.hpp"
#include "bobsearch/corpus.hpp"
#include "bobsearch/features.hpp"
#include "bobsearch/image.hpp"

namespace bob {

struct SubtypeSpec {
  std::string code;
  std::string site;
  std::size_t patients = 1;
};

/// Catalog skeleton: each patient gets 1..max_slides_per_patient slides.
/// A slide is unspecified with probability `unspecified_fraction`, otherwise
/// frozen with probability `frozen_fraction`, else permanent.
struct CatalogSpec {
  std::vector<SubtypeSpec> subtypes;
  std::size_t max_slides_per_patient = 2;
  double frozen_fraction = 0.5;
  double unspecified_fraction = 0.0;
  double mpp = kDefaultMpp;
  std::string image_extension;  // e.g. ".png"; empty leaves image_path blank
  std::uint64_t seed = 0;
};

Catalog make_catalog(const CatalogSpec& spec);

struct FeatureCorpusSpec {
  CatalogSpec catalog;
  std::size_t patches_per_slide = 40;
  std::size_t dim = 1024;
  std::size_t patterns_per_subtype = 3;
  /// Prototypes shared by every subtype; 0 disables overlap.
  std::size_t shared_patterns = 0;
  /// Per-slide share of patches drawn from the subtype's own prototypes,
  /// uniform in [min, max]; the rest come from the shared pool.
  double distinctive_min = 1.0;
  double distinctive_max = 1.0;
  /// Standard deviation of per-patch noise relative to unit prototypes.
  double patch_noise = 0.3;
  /// Standard deviation of a per-patient offset shared by its slides.
  double patient_noise = 0.1;
  std::uint64_t seed = 0;
};

struct FeatureCorpus {
  Catalog catalog;
  std::map<std::string, BunchOfBarcodes> bunches;
};

/// Streams the feature vectors of every slide (catalog order) to `sink`.
void generate_features(
    const FeatureCorpusSpec& spec, const Catalog& catalog,
    const std::function<void(const SlideRecord&,
                             std::vector<FeatureVector>&&)>& sink);

/// Catalog plus MinMax-barcoded bunches of the generated features.
FeatureCorpus make_feature_corpus(const FeatureCorpusSpec& spec);

struct SlideImageSpec {
  int grid = 30;       // canvas side in patches
  int patch_px = 32;   // patch side in pixels
  /// Target tissue area in whole patches.
  double min_tissue_patches = 540.0;
  double max_tissue_patches = 620.0;
  int regions = 4;
};

/// Physical patch size / patch_px: the mpp that makes 500 um patches exactly
/// patch_px pixels wide.
double synthetic_mpp(const SlideImageSpec& spec, double patch_size_um = 500.0);

/// Paints one slide. The look depends on subtype_code; layout and noise on
/// seed.
RgbImage synth_slide_image(const std::string& subtype_code, std::uint64_t seed,
                           const SlideImageSpec& spec = {});

/// Writes `catalog.csv` and one image per slide (PNG, or TIFF when the
/// catalog spec's extension is ".tif"/".tiff") into `dir`. Returns the
/// catalog with relative image paths.
Catalog write_image_corpus(const std::filesystem::path& dir, CatalogSpec spec,
                           const SlideImageSpec& image_spec = {});

/// Writes `catalog.csv` and `features.csv` into `dir`.
Catalog write_feature_corpus(const std::filesystem::path& dir,
                             const FeatureCorpusSpec& spec);

/// `count` subtypes named T00, T01, ... in consecutive groups of `per_site`
/// per site, sites named SITE0, SITE1, ...
std::vector<SubtypeSpec> simple_subtypes(std::size_t count,
                                         std::size_t per_site,
                                         std::size_t patients);

}  // namespace bob

#endif  // BOBSEARCH_SYNTH_HPP_
