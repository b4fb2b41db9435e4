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

/// @file kmeans.hpp
/// @brief Lloyd's k-means with k-means++ seeding over a row-major point matrix.
///
/// Deterministic for a fixed (points, k, seed). Nearest-centroid ties go to
/// the lowest centroid id. A cluster that loses all of its points keeps its
/// previous centroid; clusters still empty at the end are dropped and the
/// remaining ids compacted in their original order.

#ifndef BOBSEARCH_KMEANS_HPP_
#define BOBSEARCH_KMEANS_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace bob {

inline constexpr int kMaxKMeansIterations = 300;

struct KMeansResult {
  std::vector<int> assignments;  // one per point, in [0, k)
  std::vector<double> centroids;  // k rows of `dim` values
  std::size_t dim = 0;
  int k = 0;
  double inertia = 0.0;  // sum of squared distances to assigned centroid
  int iterations = 0;
  bool converged = false;
};

/// k-means++ seeding: indices of the points chosen as initial centroids.
/// Returns fewer than k indices when the points hold fewer than k distinct
/// locations.
std::vector<std::size_t> kmeanspp_seeds(std::span<const double> points,
                                        std::size_t dim, int k,
                                        std::uint64_t seed);

/// Lloyd iterations from the given centroids until the assignment stops
/// changing or `max_iterations` is reached.
KMeansResult lloyd(std::span<const double> points, std::size_t dim,
                   std::vector<double> centroids,
                   int max_iterations = kMaxKMeansIterations);

/// Seeds, iterates and compacts. k is clamped to the point count.
/// Throws ErrorCode::kEmptyInput on no points, kInvalidArgument on k < 1.
KMeansResult kmeans(std::span<const double> points, std::size_t dim, int k,
                    std::uint64_t seed);

}  // namespace bob

#endif  // BOBSEARCH_KMEANS_HPP_
