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

#ifndef BOBSEARCH_PATCH_HPP_
#define BOBSEARCH_PATCH_HPP_

#include <compare>
#include <cstdint>

namespace bob {

/// Top-left corner of a patch in native slide pixels.
struct PatchCoord {
  std::int32_t x = 0;
  std::int32_t y = 0;

  friend bool operator==(const PatchCoord&, const PatchCoord&) = default;
  /// Row-major: (y, x).
  friend auto operator<=>(const PatchCoord& a, const PatchCoord& b) {
    if (auto c = a.y <=> b.y; c != 0) return c;
    return a.x <=> b.x;
  }
};

}  // namespace bob

#endif  // BOBSEARCH_PATCH_HPP_
