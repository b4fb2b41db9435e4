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

/// @file barcode.hpp
/// @brief MinMax barcodes, Hamming distance and the bunch-of-barcodes
/// slide distance.
///
/// Bits are packed 64 per word; bit i lives in word i / 64 at position
/// i % 64. Words beyond the width are zero so a word-wise popcount counts
/// exactly the differing bits.

#ifndef BOBSEARCH_BARCODE_HPP_
#define BOBSEARCH_BARCODE_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bobsearch/patch.hpp"

namespace bob {

constexpr std::size_t words_for_bits(std::size_t bits) noexcept {
  return (bits + 63) / 64;
}

/// Read-only view of one packed barcode.
struct BarcodeView {
  std::span<const std::uint64_t> words;
  std::uint32_t width = 0;

  bool bit(std::size_t i) const noexcept {
    return (words[i / 64] >> (i % 64)) & 1U;
  }
};

class Barcode {
 public:
  Barcode() = default;
  explicit Barcode(std::uint32_t width)
      : width_(width), words_(words_for_bits(width), 0) {}

  std::uint32_t width() const noexcept { return width_; }
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  bool bit(std::size_t i) const noexcept { return view().bit(i); }
  void set(std::size_t i) noexcept { words_[i / 64] |= std::uint64_t{1} << (i % 64); }

  BarcodeView view() const noexcept { return {words_, width_}; }
  operator BarcodeView() const noexcept { return view(); }  // NOLINT

  bool operator==(const Barcode&) const = default;

 private:
  std::uint32_t width_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Bit i is set iff values[i + 1] > values[i]; ties give 0. Width d - 1.
/// Throws ErrorCode::kDimension when d < 2.
Barcode minmax_barcode(std::span<const double> values);

/// Number of differing bits. Throws kDimension on a width mismatch.
std::uint32_t hamming(BarcodeView a, BarcodeView b);

/// All barcodes of one slide, stored contiguously.
class BunchOfBarcodes {
 public:
  BunchOfBarcodes() = default;
  BunchOfBarcodes(std::string slide_id, std::uint32_t width);

  const std::string& slide_id() const noexcept { return slide_id_; }
  std::uint32_t width() const noexcept { return width_; }
  std::size_t words_per_barcode() const noexcept { return stride_; }
  std::size_t size() const noexcept { return origins_.size(); }
  bool empty() const noexcept { return origins_.empty(); }

  /// Throws kDimension when the width differs from the bunch's.
  void add(const Barcode& barcode, PatchCoord origin = {});
  /// Appends raw packed words (exactly words_per_barcode()).
  void add_words(std::span<const std::uint64_t> words, PatchCoord origin);

  BarcodeView barcode(std::size_t i) const noexcept {
    return {std::span<const std::uint64_t>(words_).subspan(i * stride_, stride_),
            width_};
  }
  PatchCoord origin(std::size_t i) const noexcept { return origins_[i]; }
  std::span<const std::uint64_t> words() const noexcept { return words_; }

  bool operator==(const BunchOfBarcodes&) const = default;

 private:
  std::string slide_id_;
  std::uint32_t width_ = 0;
  std::size_t stride_ = 0;
  std::vector<std::uint64_t> words_;
  std::vector<PatchCoord> origins_;
};

/// Median over query barcodes of the minimum Hamming distance to any target
/// barcode; an even count averages the middle pair. Not symmetric.
/// Throws kDimension on width mismatch and kEmptyInput on an empty bunch.
double bob_distance(const BunchOfBarcodes& query,
                    const BunchOfBarcodes& target);

}  // namespace bob

#endif  // BOBSEARCH_BARCODE_HPP_
