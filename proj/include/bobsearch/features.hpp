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

/// @file features.hpp
/// @brief Real-valued patch descriptors: the built-in reference extractor and
/// the feature file that carries vectors computed by an external network.
///
/// Feature file layout (UTF-8, comma-delimited):
///
///     slide_id,x,y,<d>
///     S1,0,0,0.12,0.5,...        (d values per row)
///
/// The fourth header field is the declared dimension. The literal token `d`
/// is also accepted, in which case the first row fixes the dimension.

#ifndef BOBSEARCH_FEATURES_HPP_
#define BOBSEARCH_FEATURES_HPP_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "bobsearch/image.hpp"
#include "bobsearch/patch.hpp"

namespace bob {

struct FeatureVector {
  std::string slide_id;
  PatchCoord patch;
  std::vector<double> values;

  bool operator==(const FeatureVector&) const = default;
};

inline constexpr std::size_t kColorHistogramBins = 256;
inline constexpr std::size_t kOrientationBins = 16;
inline constexpr std::size_t kSpatialGrid = 4;  // 4 x 4 cells
inline constexpr std::size_t kReferenceDim =
    3 * kColorHistogramBins + kOrientationBins * kSpatialGrid * kSpatialGrid;
static_assert(kReferenceDim == 1024);

/// 1024 values: three 256-bin normalised channel histograms, then a 16-bin
/// gradient-orientation histogram for each of 4x4 spatial cells of the
/// grayscale patch, magnitude weighted and L1-normalised over the block.
/// Orientation bin b covers angles [b, b+1) * 22.5 degrees of the signed
/// gradient direction atan2(gy, gx), so bins 0 and 8 hold horizontal
/// gradients. A flat patch yields an all-zero gradient block.
std::vector<double> extract_features_reference(ImageView patch);

/// Throws kDimension on a row whose width disagrees with the declared
/// dimension and kValue on a non-finite or unparsable number; both name the
/// line.
std::vector<FeatureVector> import_features(std::istream& in);
std::vector<FeatureVector> load_features(const std::filesystem::path& path);

/// Writes values with 9 significant digits. Throws kDimension on mixed d.
void export_features(std::ostream& out, std::span<const FeatureVector> vectors);

/// Incremental export: writes the header on construction, then one row per
/// write(). Throws kDimension when a vector's length differs from `dim`.
class FeatureWriter {
 public:
  FeatureWriter(std::ostream& out, std::size_t dim);

  void write(const FeatureVector& vector);

 private:
  std::ostream* out_;
  std::size_t dim_;
};

}  // namespace bob

#endif  // BOBSEARCH_FEATURES_HPP_
