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

#include "bobsearch/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/binomial.hpp>
#include <cmath>

#include "bobsearch/error.hpp"

namespace bob {

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    fail(ErrorCode::kInvalidArgument, "pearson: inputs differ in length");
  }
  if (x.size() < 2) {
    fail(ErrorCode::kInvalidArgument, "pearson: need at least 2 samples");
  }
  const auto n = static_cast<double>(x.size());
  double mean_x = 0.0;
  double mean_y = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mean_x += x[i];
    mean_y += y[i];
  }
  mean_x /= n;
  mean_y /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) {
    fail(ErrorCode::kUndefinedCorrelation,
         "pearson: correlation undefined for a constant input");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CoxStuartResult cox_stuart(std::span<const double> values,
                           TrendAlternative alternative) {
  const std::size_t n = values.size();
  const std::size_t offset = (n + 1) / 2;
  CoxStuartResult result;
  for (std::size_t i = 0; i < n / 2; ++i) {
    const double earlier = values[i];
    const double later = values[i + offset];
    if (later == earlier) continue;
    ++result.pairs;
    if (later > earlier) ++result.increases;
  }
  if (result.pairs == 0) {
    fail(ErrorCode::kDegenerateSequence,
         "Cox-Stuart: no untied pairs in a sequence of " + std::to_string(n));
  }

  const boost::math::binomial_distribution<double> binom(
      static_cast<double>(result.pairs), 0.5);
  const auto s = static_cast<double>(result.increases);
  if (alternative == TrendAlternative::kIncreasing) {
    result.p_value =
        result.increases == 0 ? 1.0 : boost::math::cdf(complement(binom, s - 1));
  } else {
    result.p_value = boost::math::cdf(binom, s);
  }
  result.p_value = std::clamp(result.p_value, 0.0, 1.0);
  return result;
}

}  // namespace bob
