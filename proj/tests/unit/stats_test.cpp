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

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "bobsearch/error.hpp"
#include "bobsearch/stats.hpp"

namespace bob {
namespace {

// Binomial(m, 1/2) upper tail by direct summation of m choose k.
double upper_tail(std::size_t m, std::size_t s) {
  double total = 0.0;
  for (std::size_t k = s; k <= m; ++k) {
    double c = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
      c = c * static_cast<double>(m - i) / static_cast<double>(i + 1);
    }
    total += c;
  }
  return total / std::pow(2.0, static_cast<double>(m));
}

ErrorCode error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error";
  return ErrorCode::kInvalidArgument;
}

TEST(Pearson, PerfectAndAnti) {
  const std::vector<double> x = {1, 2, 3, 4};
  const std::vector<double> y = {2, 4, 6, 8};
  const std::vector<double> z = {8, 6, 4, 2};
  EXPECT_NEAR(pearson(x, y), 1.0, 1e-15);
  EXPECT_NEAR(pearson(x, z), -1.0, 1e-15);
}

TEST(Pearson, HandComputed) {
  // Deviations (-1, 0, 1) and (-1, -1, 2): r = 3 / sqrt(2 * 6).
  const std::vector<double> x = {1, 2, 3};
  const std::vector<double> y = {1, 1, 4};
  EXPECT_NEAR(pearson(x, y), 3.0 / std::sqrt(12.0), 1e-15);
}

TEST(Pearson, Errors) {
  const std::vector<double> a = {1, 2, 3};
  const std::vector<double> flat = {5, 5, 5};
  const std::vector<double> shorter = {1, 2};
  const std::vector<double> one = {1};
  EXPECT_EQ(error_of([&] { pearson(a, flat); }),
            ErrorCode::kUndefinedCorrelation);
  EXPECT_EQ(error_of([&] { pearson(a, shorter); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(error_of([&] { pearson(one, one); }), ErrorCode::kInvalidArgument);
}

TEST(CoxStuart, StrictlyIncreasingTen) {
  std::vector<double> v(10);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i + 1);
  const auto r = cox_stuart(v, TrendAlternative::kIncreasing);
  EXPECT_EQ(r.pairs, 5U);
  EXPECT_EQ(r.increases, 5U);
  EXPECT_DOUBLE_EQ(r.p_value, 0.03125);
  EXPECT_DOUBLE_EQ(cox_stuart(v, TrendAlternative::kDecreasing).p_value, 1.0);
}

TEST(CoxStuart, OddLengthDropsMiddleAndTiesAreDiscarded) {
  // N = 7, c = 4: pairs (3,9) (1,1) (4,2); the tie is dropped.
  const std::vector<double> v = {3, 1, 4, 100, 9, 1, 2};
  const auto r = cox_stuart(v, TrendAlternative::kIncreasing);
  EXPECT_EQ(r.pairs, 2U);
  EXPECT_EQ(r.increases, 1U);
  EXPECT_DOUBLE_EQ(r.p_value, 0.75);
  EXPECT_DOUBLE_EQ(cox_stuart(v, TrendAlternative::kDecreasing).p_value, 0.75);
}

TEST(CoxStuart, DegenerateThrows) {
  const std::vector<double> flat = {2, 2, 2, 2};
  const std::vector<double> single = {1};
  EXPECT_EQ(error_of([&] { cox_stuart(flat, TrendAlternative::kIncreasing); }),
            ErrorCode::kDegenerateSequence);
  EXPECT_EQ(
      error_of([&] { cox_stuart(single, TrendAlternative::kIncreasing); }),
      ErrorCode::kDegenerateSequence);
}

TEST(CoxStuart, RandomSequencesMatchBinomialTail) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> value(0, 4);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> v(2 + rng() % 40);
    for (double& x : v) x = value(rng);
    const std::size_t c = (v.size() + 1) / 2;
    std::size_t m = 0, s = 0;
    for (std::size_t i = 0; i + c < v.size(); ++i) {
      if (v[i + c] == v[i]) continue;
      ++m;
      s += v[i + c] > v[i];
    }
    if (m == 0) continue;
    const auto up = cox_stuart(v, TrendAlternative::kIncreasing);
    const auto down = cox_stuart(v, TrendAlternative::kDecreasing);
    EXPECT_EQ(up.pairs, m);
    EXPECT_EQ(up.increases, s);
    EXPECT_NEAR(up.p_value, upper_tail(m, s), 1e-12);
    EXPECT_NEAR(down.p_value, upper_tail(m, m - s), 1e-12);
  }
}

}  // namespace
}  // namespace bob
