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

#ifndef BOBSEARCH_STATS_HPP_
#define BOBSEARCH_STATS_HPP_

#include <cstddef>
#include <span>

namespace bob {

/// Product-moment correlation. Throws kInvalidArgument on length mismatch or
/// fewer than 2 samples, kUndefinedCorrelation when either input is constant.
double pearson(std::span<const double> x, std::span<const double> y);

enum class TrendAlternative { kIncreasing, kDecreasing };

struct CoxStuartResult {
  std::size_t pairs = 0;      // untied pairs m
  std::size_t increases = 0;  // S: pairs whose later value is larger
  double p_value = 1.0;
};

/// Cox-Stuart sign test for trend. values[i] is paired with values[i + c],
/// c = ceil(N / 2), so the middle element is dropped for odd N; tied pairs
/// are discarded. Under no trend S ~ Binomial(m, 1/2) and the p-value is the
/// one-sided tail P(X >= S) for kIncreasing, P(X <= S) for kDecreasing.
/// Throws kDegenerateSequence when no untied pair remains.
CoxStuartResult cox_stuart(std::span<const double> values,
                           TrendAlternative alternative);

}  // namespace bob

#endif  // BOBSEARCH_STATS_HPP_
