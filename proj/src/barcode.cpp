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

#include "bobsearch/barcode.hpp"

#include <algorithm>
#include <bit>
#include <limits>

#include "bobsearch/error.hpp"

namespace bob {

namespace {

inline std::uint32_t hamming_words(const std::uint64_t* a,
                                   const std::uint64_t* b,
                                   std::size_t n) noexcept {
  std::uint32_t d = 0;
  for (std::size_t i = 0; i < n; ++i) {
    d += static_cast<std::uint32_t>(std::popcount(a[i] ^ b[i]));
  }
  return d;
}

// Minimum distance from each query barcode to any target barcode. On x86
// with GCC or Clang a popcnt clone is picked at load time; the generic
// build falls back to a portable bit count.
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__)) && \
    defined(__ELF__)
__attribute__((target_clones("popcnt", "default")))
#endif
void min_distances(const std::uint64_t* q, std::size_t query_count,
                   const std::uint64_t* t_begin, std::size_t target_count,
                   std::size_t stride, std::uint32_t* minima) noexcept {
  const std::uint64_t* t_end = t_begin + target_count * stride;
  for (std::size_t i = 0; i < query_count; ++i, q += stride) {
    std::uint32_t best = std::numeric_limits<std::uint32_t>::max();
    for (const std::uint64_t* t = t_begin; t != t_end; t += stride) {
      best = std::min(best, hamming_words(q, t, stride));
      if (best == 0) break;
    }
    minima[i] = best;
  }
}

}  // namespace

Barcode minmax_barcode(std::span<const double> values) {
  if (values.size() < 2) {
    fail(ErrorCode::kDimension, "MinMax barcode needs at least 2 features, got " +
                                    std::to_string(values.size()));
  }
  Barcode out(static_cast<std::uint32_t>(values.size() - 1));
  for (std::size_t i = 0; i + 1 < values.size(); ++i) {
    if (values[i + 1] - values[i] > 0.0) out.set(i);
  }
  return out;
}

std::uint32_t hamming(BarcodeView a, BarcodeView b) {
  if (a.width != b.width) {
    fail(ErrorCode::kDimension, "barcode widths differ: " +
                                    std::to_string(a.width) + " vs " +
                                    std::to_string(b.width));
  }
  return hamming_words(a.words.data(), b.words.data(), words_for_bits(a.width));
}

BunchOfBarcodes::BunchOfBarcodes(std::string slide_id, std::uint32_t width)
    : slide_id_(std::move(slide_id)),
      width_(width),
      stride_(words_for_bits(width)) {}

void BunchOfBarcodes::add(const Barcode& barcode, PatchCoord origin) {
  if (barcode.width() != width_) {
    fail(ErrorCode::kDimension, "slide " + slide_id_ + ": barcode width " +
                                    std::to_string(barcode.width()) +
                                    " does not match bunch width " +
                                    std::to_string(width_));
  }
  add_words(barcode.words(), origin);
}

void BunchOfBarcodes::add_words(std::span<const std::uint64_t> words,
                                PatchCoord origin) {
  if (words.size() != stride_) {
    fail(ErrorCode::kDimension,
         "slide " + slide_id_ + ": wrong packed barcode length");
  }
  words_.insert(words_.end(), words.begin(), words.end());
  origins_.push_back(origin);
}

double bob_distance(const BunchOfBarcodes& query,
                    const BunchOfBarcodes& target) {
  if (query.width() != target.width()) {
    fail(ErrorCode::kDimension, "bunch widths differ: " +
                                    std::to_string(query.width()) + " vs " +
                                    std::to_string(target.width()));
  }
  if (query.empty() || target.empty()) {
    fail(ErrorCode::kEmptyInput, "bunch distance needs non-empty bunches");
  }
  std::vector<std::uint32_t> minima(query.size());
  min_distances(query.words().data(), query.size(), target.words().data(),
                target.size(), query.words_per_barcode(), minima.data());

  const std::size_t n = minima.size();
  const std::size_t mid = n / 2;
  std::nth_element(minima.begin(), minima.begin() + mid, minima.end());
  const double upper = minima[mid];
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(minima.begin(), minima.begin() + mid);
  return 0.5 * (lower + upper);
}

}  // namespace bob
