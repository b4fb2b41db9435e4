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

#include "bobsearch/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>
#include <utility>

#include "bobsearch/error.hpp"
#include "bobsearch/kmeans.hpp"

namespace bob {

namespace {

// Largest raster side segmented at full resolution; bigger slides are
// segmented on a thumbnail.
constexpr int kMaxMaskSide = 4096;

// Native pixel -> mask pixel, by the mask pixel containing the native
// pixel's centre.
int to_mask(int native, double scale, int mask_extent) {
  const auto m = static_cast<int>(std::floor((native + 0.5) * scale));
  return std::clamp(m, 0, mask_extent - 1);
}

// Run-length weights of consecutive native pixels mapping to each mask pixel.
std::vector<std::pair<int, int>> mask_runs(int start, int length, double scale,
                                           int mask_extent) {
  std::vector<std::pair<int, int>> runs;
  for (int i = start; i < start + length; ++i) {
    const int m = to_mask(i, scale, mask_extent);
    if (!runs.empty() && runs.back().first == m) {
      ++runs.back().second;
    } else {
      runs.emplace_back(m, 1);
    }
  }
  return runs;
}

}  // namespace

double TissueMask::tissue_fraction() const noexcept {
  if (bits.empty()) return 0.0;
  const auto tissue = std::count(bits.begin(), bits.end(), std::uint8_t{1});
  return static_cast<double>(tissue) / static_cast<double>(bits.size());
}

TissueMask segment_tissue(ImageView image, int brightness_threshold) {
  return segment_thumbnail(image, 1.0, image.width(), image.height(),
                           brightness_threshold);
}

TissueMask segment_thumbnail(ImageView thumbnail, double scale,
                             int native_width, int native_height,
                             int brightness_threshold) {
  if (thumbnail.empty()) fail(ErrorCode::kEmptyImage, "image has no pixels");
  if (!(scale > 0.0) || scale > 1.0) {
    fail(ErrorCode::kInvalidArgument, "mask scale must lie in (0, 1]");
  }
  TissueMask mask;
  mask.width = thumbnail.width();
  mask.height = thumbnail.height();
  mask.scale = scale;
  mask.native_width = native_width;
  mask.native_height = native_height;
  mask.bits.resize(static_cast<std::size_t>(mask.width) *
                   static_cast<std::size_t>(mask.height));
  std::size_t i = 0;
  for (int y = 0; y < mask.height; ++y) {
    const std::uint8_t* p = thumbnail.row(y);
    for (int x = 0; x < mask.width; ++x, p += 3) {
      const int lowest = std::min({p[0], p[1], p[2]});
      mask.bits[i++] = lowest > brightness_threshold ? 0 : 1;
    }
  }
  return mask;
}

RgbImage make_thumbnail(ImageView image, double scale) {
  if (image.empty()) fail(ErrorCode::kEmptyImage, "image has no pixels");
  if (!(scale > 0.0) || scale > 1.0) {
    fail(ErrorCode::kInvalidArgument, "thumbnail scale must lie in (0, 1]");
  }
  const int w = std::max(1, static_cast<int>(std::lround(image.width() * scale)));
  const int h =
      std::max(1, static_cast<int>(std::lround(image.height() * scale)));
  RgbImage out(w, h);
  for (int y = 0; y < h; ++y) {
    const int sy = std::min(image.height() - 1,
                            static_cast<int>((y + 0.5) / scale));
    for (int x = 0; x < w; ++x) {
      const int sx =
          std::min(image.width() - 1, static_cast<int>((x + 0.5) / scale));
      const std::uint8_t* p = image.pixel(sx, sy);
      out.set(x, y, p[0], p[1], p[2]);
    }
  }
  return out;
}

int PatchSpec::pixel_size() const {
  validate();
  return static_cast<int>(std::lround(physical_size_um / magnification_mpp));
}

void PatchSpec::validate() const {
  if (!(physical_size_um > 0.0) || !std::isfinite(physical_size_um)) {
    fail(ErrorCode::kInvalidArgument, "patch physical size must be > 0");
  }
  if (!(magnification_mpp > 0.0) || !std::isfinite(magnification_mpp)) {
    fail(ErrorCode::kInvalidArgument, "magnification mpp must be > 0");
  }
  if (!(min_tissue_fraction >= 0.0 && min_tissue_fraction <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "min tissue fraction must lie in [0, 1]");
  }
  if (std::lround(physical_size_um / magnification_mpp) < 1) {
    fail(ErrorCode::kInvalidArgument, "patch is smaller than one pixel");
  }
}

double patch_tissue_fraction(const TissueMask& mask, PatchCoord origin,
                             int patch_size) {
  const auto cols = mask_runs(origin.x, patch_size, mask.scale, mask.width);
  const auto rows = mask_runs(origin.y, patch_size, mask.scale, mask.height);
  std::int64_t tissue = 0;
  for (const auto& [my, row_weight] : rows) {
    std::int64_t row_tissue = 0;
    for (const auto& [mx, col_weight] : cols) {
      if (mask.at(mx, my)) row_tissue += col_weight;
    }
    tissue += row_tissue * row_weight;
  }
  const double area = static_cast<double>(patch_size) * patch_size;
  return static_cast<double>(tissue) / area;
}

std::vector<PatchCoord> grid_patches(const TissueMask& mask,
                                     const PatchSpec& spec) {
  const int size = spec.pixel_size();
  std::vector<PatchCoord> out;
  if (mask.bits.empty()) return out;
  for (int y = 0; y + size <= mask.native_height; y += size) {
    for (int x = 0; x + size <= mask.native_width; x += size) {
      const PatchCoord origin{x, y};
      if (patch_tissue_fraction(mask, origin, size) >=
          spec.min_tissue_fraction) {
        out.push_back(origin);
      }
    }
  }
  return out;
}

ClusterDescriptor patch_descriptor(ImageView patch) {
  if (patch.empty()) fail(ErrorCode::kEmptyImage, "patch has no pixels");
  std::array<std::uint64_t, 3 * kClusterBins> counts{};
  constexpr int kShift = 5;  // 256 levels / 8 bins
  for (int y = 0; y < patch.height(); ++y) {
    const std::uint8_t* p = patch.row(y);
    for (int x = 0; x < patch.width(); ++x, p += 3) {
      for (std::size_t c = 0; c < 3; ++c) {
        ++counts[c * kClusterBins + (p[c] >> kShift)];
      }
    }
  }
  const double pixels =
      static_cast<double>(patch.width()) * static_cast<double>(patch.height());
  ClusterDescriptor out;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<double>(counts[i]) / pixels;
  }
  return out;
}

Clustering cluster_patches(std::span<const ClusterDescriptor> descriptors,
                           int k, std::uint64_t seed) {
  if (descriptors.empty()) {
    fail(ErrorCode::kEmptyInput, "no patch descriptors to cluster");
  }
  std::vector<double> points;
  points.reserve(descriptors.size() * std::tuple_size_v<ClusterDescriptor>);
  for (const auto& d : descriptors) points.insert(points.end(), d.begin(), d.end());
  KMeansResult result =
      kmeans(points, std::tuple_size_v<ClusterDescriptor>, k, seed);
  return Clustering{std::move(result.assignments), result.k};
}

std::size_t selection_count(std::size_t cluster_size, double fraction) {
  if (cluster_size == 0) return 0;
  const auto rounded = static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(cluster_size)));
  return std::clamp<std::size_t>(rounded, 1, cluster_size);
}

Mosaic select_mosaic(std::string slide_id, std::span<const PatchCoord> patches,
                     std::span<const int> assignments, int k,
                     double selection_fraction) {
  if (!(selection_fraction > 0.0 && selection_fraction <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "selection fraction must lie in (0, 1]");
  }
  if (patches.size() != assignments.size()) {
    fail(ErrorCode::kInvalidArgument,
         "slide " + slide_id + ": assignments do not cover the patches");
  }
  std::vector<std::vector<PatchCoord>> members(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < patches.size(); ++i) {
    const int c = assignments[i];
    if (c < 0 || c >= k) {
      fail(ErrorCode::kInvalidArgument,
           "slide " + slide_id + ": cluster id out of range");
    }
    members[static_cast<std::size_t>(c)].push_back(patches[i]);
  }

  Mosaic mosaic;
  mosaic.slide_id = std::move(slide_id);
  mosaic.k = k;
  mosaic.selection_fraction = selection_fraction;
  for (std::size_t c = 0; c < members.size(); ++c) {
    auto& group = members[c];
    std::sort(group.begin(), group.end());
    const std::size_t m = group.size();
    const std::size_t take = selection_count(m, selection_fraction);
    for (std::size_t i = 0; i < take; ++i) {
      const PatchCoord p = group[i * m / take];
      mosaic.patches.push_back({p.x, p.y, static_cast<std::int32_t>(c)});
    }
  }
  return mosaic;
}

void to_json(nlohmann::json& j, const Mosaic& mosaic) {
  nlohmann::json patches = nlohmann::json::array();
  for (const MosaicPatch& p : mosaic.patches) {
    patches.push_back({{"x", p.x}, {"y", p.y}, {"cluster", p.cluster}});
  }
  j = nlohmann::json{{"slide_id", mosaic.slide_id},
                     {"k", mosaic.k},
                     {"fraction", mosaic.selection_fraction},
                     {"patches", std::move(patches)}};
}

void from_json(const nlohmann::json& j, Mosaic& mosaic) {
  j.at("slide_id").get_to(mosaic.slide_id);
  j.at("k").get_to(mosaic.k);
  j.at("fraction").get_to(mosaic.selection_fraction);
  mosaic.patches.clear();
  for (const auto& p : j.at("patches")) {
    mosaic.patches.push_back({p.at("x").get<std::int32_t>(),
                              p.at("y").get<std::int32_t>(),
                              p.at("cluster").get<std::int32_t>()});
  }
}

SlideMosaic build_mosaic(const std::string& slide_id, ImageView image,
                         const MosaicParams& params) {
  if (image.empty()) {
    fail(ErrorCode::kEmptyImage, "slide " + slide_id + ": image has no pixels");
  }
  TissueMask mask;
  const int side = std::max(image.width(), image.height());
  if (side > kMaxMaskSide) {
    const double scale = static_cast<double>(kMaxMaskSide) / side;
    const RgbImage thumb = make_thumbnail(image, scale);
    mask = segment_thumbnail(thumb.view(), scale, image.width(), image.height(),
                             params.brightness_threshold);
  } else {
    mask = segment_tissue(image, params.brightness_threshold);
  }

  const std::vector<PatchCoord> patches = grid_patches(mask, params.patch);
  SlideMosaic out;
  out.tissue_patch_count = patches.size();
  out.mosaic.slide_id = slide_id;
  out.mosaic.selection_fraction = params.selection_fraction;
  if (patches.empty()) return out;

  const int size = params.patch.pixel_size();
  std::vector<ClusterDescriptor> descriptors;
  descriptors.reserve(patches.size());
  for (const PatchCoord& p : patches) {
    descriptors.push_back(patch_descriptor(image.crop(p.x, p.y, size, size)));
  }
  const Clustering clustering =
      cluster_patches(descriptors, params.k, params.seed);
  out.mosaic = select_mosaic(slide_id, patches, clustering.assignments,
                             clustering.k, params.selection_fraction);
  return out;
}

}  // namespace bob
