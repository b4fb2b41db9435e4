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

/// @file preprocess.hpp
/// @brief Slide image -> mosaic of representative patches.
///
/// The stages run in order: tissue segmentation by brightness threshold, a
/// non-overlapping patch grid of fixed physical size, k-means over a cheap
/// colour descriptor of every tissue patch, and proportional selection of a
/// few patches from each cluster.

#ifndef BOBSEARCH_PREPROCESS_HPP_
#define BOBSEARCH_PREPROCESS_HPP_

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "bobsearch/image.hpp"
#include "bobsearch/patch.hpp"

namespace bob {

inline constexpr int kDefaultBrightnessThreshold = 220;

/// Binary tissue map, possibly at thumbnail scale. `scale` is mask pixels per
/// native pixel; native_width/native_height are the full-resolution extents.
struct TissueMask {
  int width = 0;
  int height = 0;
  double scale = 1.0;
  int native_width = 0;
  int native_height = 0;
  std::vector<std::uint8_t> bits;  // 1 = tissue, row-major

  std::uint8_t at(int x, int y) const noexcept {
    return bits[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                static_cast<std::size_t>(x)];
  }
  double tissue_fraction() const noexcept;
};

/// A pixel is background iff all three channels exceed the threshold.
/// Throws ErrorCode::kEmptyImage.
TissueMask segment_tissue(ImageView image,
                          int brightness_threshold = kDefaultBrightnessThreshold);

/// Same as segment_tissue, but the mask is reported against a native raster
/// that is 1/scale times larger (the image is a thumbnail).
TissueMask segment_thumbnail(ImageView thumbnail, double scale,
                             int native_width, int native_height,
                             int brightness_threshold =
                                 kDefaultBrightnessThreshold);

/// Nearest-neighbour downsample by `scale` in (0, 1].
RgbImage make_thumbnail(ImageView image, double scale);

struct PatchSpec {
  double physical_size_um = 500.0;
  double magnification_mpp = kDefaultMagnificationMpp;
  double min_tissue_fraction = 0.5;

  static constexpr double kDefaultMagnificationMpp = 0.5;

  /// physical_size_um / magnification_mpp, rounded. 1000 with defaults.
  int pixel_size() const;
  /// Throws ErrorCode::kInvalidArgument when a field is out of range.
  void validate() const;
};

/// Row-major grid of patches whose mask-derived tissue fraction reaches
/// spec.min_tissue_fraction. Border patches that do not fit are discarded.
std::vector<PatchCoord> grid_patches(const TissueMask& mask,
                                     const PatchSpec& spec);

/// Tissue fraction of one native-pixel square, resampling the mask by
/// nearest neighbour.
double patch_tissue_fraction(const TissueMask& mask, PatchCoord origin,
                             int patch_size);

inline constexpr std::size_t kClusterBins = 8;
using ClusterDescriptor = std::array<double, 3 * kClusterBins>;

/// Per-channel 8-bin intensity histograms, each normalised to sum to 1.
ClusterDescriptor patch_descriptor(ImageView patch);

struct Clustering {
  std::vector<int> assignments;
  int k = 0;
};

/// k-means++ / Lloyd over the descriptors; see kmeans.hpp for the contract.
Clustering cluster_patches(std::span<const ClusterDescriptor> descriptors,
                           int k, std::uint64_t seed);

struct MosaicPatch {
  std::int32_t x = 0;
  std::int32_t y = 0;
  std::int32_t cluster = 0;

  bool operator==(const MosaicPatch&) const = default;
  PatchCoord coord() const noexcept { return {x, y}; }
};

struct Mosaic {
  std::string slide_id;
  std::vector<MosaicPatch> patches;  // grouped by cluster, row-major within
  int k = 0;
  double selection_fraction = 0.0;

  bool operator==(const Mosaic&) const = default;
};

/// Number of patches taken from a cluster of `cluster_size`.
std::size_t selection_count(std::size_t cluster_size, double fraction);

/// Within each cluster, patches sorted by (y, x) are sampled at a uniform
/// index stride. Throws kInvalidArgument for a fraction outside (0, 1] or
/// mismatched spans.
Mosaic select_mosaic(std::string slide_id, std::span<const PatchCoord> patches,
                     std::span<const int> assignments, int k,
                     double selection_fraction);

void to_json(nlohmann::json& j, const Mosaic& mosaic);
void from_json(const nlohmann::json& j, Mosaic& mosaic);

struct MosaicParams {
  PatchSpec patch;
  int brightness_threshold = kDefaultBrightnessThreshold;
  int k = 9;
  double selection_fraction = 0.15;
  std::uint64_t seed = 0;
};

struct SlideMosaic {
  Mosaic mosaic;
  std::size_t tissue_patch_count = 0;
};

/// Full preprocessing chain for one slide image at native resolution.
SlideMosaic build_mosaic(const std::string& slide_id, ImageView image,
                         const MosaicParams& params);

}  // namespace bob

#endif  // BOBSEARCH_PREPROCESS_HPP_
