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

/// @file index.hpp
/// @brief Archive-wide slide index: build, persist, search.
///
/// ## File format
///
/// All integers are little-endian.
///
///     magic          8 bytes  "BOBIDX1\0"
///     version        u32      1
///     width          u32      bits per barcode
///     entry_count    u64
///     entry_count times:
///       slide_id       u32 length + UTF-8 bytes
///       patient_id     u32 length + UTF-8 bytes
///       anatomic_site  u32 length + UTF-8 bytes
///       subtype_code   u32 length + UTF-8 bytes
///       section_type   u32 length + "frozen" | "permanent" | "unspecified"
///       barcode_count  u32      >= 1
///       barcode_count times:
///         x, y         i32, i32 patch origin
///         words        ceil(width / 64) x u64, unused high bits zero
///     checksum       u64      CRC-64/XZ of every preceding byte
///
/// A wrong magic or unknown version raises ErrorCode::kFormat; truncation,
/// a checksum mismatch or any structural inconsistency raises kCorruptIndex.

#ifndef BOBSEARCH_INDEX_HPP_
#define BOBSEARCH_INDEX_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bobsearch/barcode.hpp"
#include "bobsearch/corpus.hpp"

namespace bob {

inline constexpr std::uint32_t kIndexFormatVersion = 1;

struct SlideIndexEntry {
  std::string slide_id;
  std::string patient_id;
  std::string anatomic_site;
  std::string subtype_code;
  SectionType section_type = SectionType::kUnspecified;
  BunchOfBarcodes bunch;

  bool operator==(const SlideIndexEntry&) const = default;
};

class Index {
 public:
  Index() = default;
  /// Throws kDimension when a bunch width differs from `width`, kEmptyInput
  /// on an empty bunch and kDuplicateId on a repeated slide_id.
  Index(std::uint32_t width, std::vector<SlideIndexEntry> entries);

  std::uint32_t width() const noexcept { return width_; }
  const std::vector<SlideIndexEntry>& entries() const noexcept {
    return entries_;
  }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t total_barcodes() const noexcept;

  /// nullptr when absent.
  const SlideIndexEntry* find(std::string_view slide_id) const;

  bool operator==(const Index& other) const {
    return width_ == other.width_ && entries_ == other.entries_;
  }

 private:
  std::uint32_t width_ = 0;
  std::vector<SlideIndexEntry> entries_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

/// One entry per catalog slide, in catalog order. Bunches for slides absent
/// from the catalog are ignored. Throws kMissingSlide naming the first slide
/// without a bunch, kDimension on mixed widths.
Index build_index(const Catalog& catalog,
                  std::map<std::string, BunchOfBarcodes> bunches);

std::vector<std::uint8_t> serialize_index(const Index& index);
Index deserialize_index(std::span<const std::uint8_t> bytes);

void save_index(const Index& index, const std::filesystem::path& path);
Index load_index(const std::filesystem::path& path);

struct SearchHit {
  std::string slide_id;
  std::string subtype_code;
  std::string patient_id;
  double distance = 0.0;

  bool operator==(const SearchHit&) const = default;
};

enum class Scope { kHorizontal, kVertical };

struct SearchOptions {
  Scope scope = Scope::kHorizontal;
  /// Vertical scope only; empty means the query slide's own site.
  std::string site;
  /// Restricts candidates to one section type when set.
  std::optional<SectionType> section;
  /// Worker threads for candidate scoring; results do not depend on it.
  unsigned threads = 1;
};

/// Leave-one-patient-out ranking: every slide of the query's patient is
/// excluded, the rest are scored by bob_distance(query, candidate) and the n
/// closest returned, ties ordered by slide_id. No distance threshold is
/// applied. Throws kNotFound for an unknown query and kInvalidArgument for
/// n == 0.
std::vector<SearchHit> search(const Index& index, std::string_view query_slide_id,
                              std::size_t n, const SearchOptions& options = {});

/// M[i][j] = bob_distance(bunch_i, bunch_j). Throws kNotFound.
std::vector<std::vector<double>> pairwise_distances(
    const Index& index, std::span<const std::string> slide_ids);

}  // namespace bob

#endif  // BOBSEARCH_INDEX_HPP_
