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

#ifndef BOBSEARCH_SRC_CHECKSUM_HPP_
#define BOBSEARCH_SRC_CHECKSUM_HPP_

#include <boost/crc.hpp>
#include <cstdint>
#include <span>
#include <string_view>

namespace bob::detail {

// CRC-64/XZ (ECMA-182 polynomial, reflected, all-ones init and xor-out).
using Crc64 = boost::crc_optimal<64, 0x42F0E1EBA9EA3693ULL,
                                 0xFFFFFFFFFFFFFFFFULL, 0xFFFFFFFFFFFFFFFFULL,
                                 true, true>;

inline std::uint64_t crc64(std::span<const std::uint8_t> bytes) {
  Crc64 crc;
  crc.process_bytes(bytes.data(), bytes.size());
  return crc.checksum();
}

/// splitmix64 finaliser.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Stable per-item seed derived from a run seed and a key such as a slide id.
inline std::uint64_t derive_seed(std::uint64_t seed, std::string_view key) {
  const auto* data = reinterpret_cast<const std::uint8_t*>(key.data());
  return mix64(seed ^ crc64({data, key.size()}));
}

}  // namespace bob::detail

#endif  // BOBSEARCH_SRC_CHECKSUM_HPP_
