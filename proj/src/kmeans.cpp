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

#include "bobsearch/kmeans.hpp"

#include <algorithm>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <limits>
#include <random>

#include "bobsearch/error.hpp"

namespace bob {

namespace {

double squared_distance(const double* a, const double* b, std::size_t dim) {
  double sum = 0.0;
  for (std::size_t i = 0; i < dim; ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return sum;
}

}  // namespace

std::vector<std::size_t> kmeanspp_seeds(std::span<const double> points,
                                        std::size_t dim, int k,
                                        std::uint64_t seed) {
  const std::size_t n = dim ? points.size() / dim : 0;
  std::vector<std::size_t> chosen;
  if (n == 0 || k < 1) return chosen;

  std::mt19937_64 rng(seed);
  boost::random::uniform_int_distribution<std::size_t> first(0, n - 1);
  chosen.push_back(first(rng));

  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  boost::random::uniform_01<double> unit;
  while (chosen.size() < static_cast<std::size_t>(k)) {
    const double* last = points.data() + chosen.back() * dim;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] =
          std::min(nearest[i], squared_distance(points.data() + i * dim, last,
                                                dim));
      total += nearest[i];
    }
    if (!(total > 0.0)) break;  // every point already coincides with a seed

    const double target = unit(rng) * total;
    double running = 0.0;
    std::size_t pick = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (nearest[i] <= 0.0) continue;
      running += nearest[i];
      pick = i;
      if (running > target) break;
    }
    chosen.push_back(pick);
  }
  return chosen;
}

KMeansResult lloyd(std::span<const double> points, std::size_t dim,
                   std::vector<double> centroids, int max_iterations) {
  const std::size_t n = dim ? points.size() / dim : 0;
  KMeansResult result;
  result.dim = dim;
  result.k = dim ? static_cast<int>(centroids.size() / dim) : 0;
  result.assignments.assign(n, -1);
  const auto k = static_cast<std::size_t>(result.k);

  std::vector<int> next(n);
  std::vector<double> sums(k * dim);
  std::vector<std::size_t> counts(k);
  for (int iter = 0; iter < max_iterations; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      const double* p = points.data() + i * dim;
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double d = squared_distance(p, centroids.data() + c * dim, dim);
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(c);
        }
      }
      next[i] = best;
    }
    result.iterations = iter + 1;
    if (next == result.assignments) {
      result.converged = true;
      break;
    }
    result.assignments = next;

    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(next[i]);
      ++counts[c];
      for (std::size_t j = 0; j < dim; ++j) {
        sums[c * dim + j] += points[i * dim + j];
      }
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      for (std::size_t j = 0; j < dim; ++j) {
        centroids[c * dim + j] =
            sums[c * dim + j] / static_cast<double>(counts[c]);
      }
    }
  }

  result.inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    result.inertia += squared_distance(
        points.data() + i * dim,
        centroids.data() + static_cast<std::size_t>(result.assignments[i]) * dim,
        dim);
  }
  result.centroids = std::move(centroids);
  return result;
}

KMeansResult kmeans(std::span<const double> points, std::size_t dim, int k,
                    std::uint64_t seed) {
  if (dim == 0 || points.size() < dim) {
    fail(ErrorCode::kEmptyInput, "k-means needs at least one point");
  }
  if (k < 1) fail(ErrorCode::kInvalidArgument, "k must be >= 1");
  const std::size_t n = points.size() / dim;
  k = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(k), n));

  std::vector<double> centroids;
  for (std::size_t index : kmeanspp_seeds(points, dim, k, seed)) {
    centroids.insert(centroids.end(), points.begin() + index * dim,
                     points.begin() + (index + 1) * dim);
  }
  KMeansResult result = lloyd(points, dim, std::move(centroids));

  std::vector<int> remap(static_cast<std::size_t>(result.k), -1);
  for (int a : result.assignments) remap[static_cast<std::size_t>(a)] = 0;
  int next_id = 0;
  std::vector<double> kept;
  for (std::size_t c = 0; c < remap.size(); ++c) {
    if (remap[c] < 0) continue;
    remap[c] = next_id++;
    kept.insert(kept.end(), result.centroids.begin() + c * dim,
                result.centroids.begin() + (c + 1) * dim);
  }
  for (int& a : result.assignments) a = remap[static_cast<std::size_t>(a)];
  result.centroids = std::move(kept);
  result.k = next_id;
  return result;
}

}  // namespace bob
