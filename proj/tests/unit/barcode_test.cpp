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

#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "bobsearch/barcode.hpp"
#include "bobsearch/error.hpp"
#include "test_support.hpp"

namespace bob {
namespace {

using testing::Bits;

std::string bits_of(const Barcode& b) {
  std::string s;
  for (std::size_t i = 0; i < b.width(); ++i) s += b.bit(i) ? '1' : '0';
  return s;
}

Barcode from_string(const std::string& s) {
  Barcode b(static_cast<std::uint32_t>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '1') b.set(i);
  }
  return b;
}

BunchOfBarcodes bunch_of(const std::vector<Bits>& barcodes) {
  BunchOfBarcodes bunch("s", static_cast<std::uint32_t>(barcodes[0].size()));
  for (const Bits& b : barcodes) bunch.add(testing::pack(b));
  return bunch;
}

TEST(MinMax, Examples) {
  const std::vector<double> rising = {1, 2, 3};
  EXPECT_EQ(bits_of(minmax_barcode(rising)), "11");
  const std::vector<double> tie = {0.2, 0.5, 0.3, 0.3};
  EXPECT_EQ(bits_of(minmax_barcode(tie)), "100");
}

TEST(MinMax, WidthAndPacking) {
  std::vector<double> v(130);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
  const Barcode b = minmax_barcode(v);
  EXPECT_EQ(b.width(), 129U);
  ASSERT_EQ(b.words().size(), 3U);
  EXPECT_EQ(b.words()[0], ~std::uint64_t{0});
  EXPECT_EQ(b.words()[1], ~std::uint64_t{0});
  EXPECT_EQ(b.words()[2], std::uint64_t{1});  // bit 128 only; padding zero
}

TEST(MinMax, TooShortThrows) {
  const std::vector<double> one = {1.0};
  try {
    minmax_barcode(one);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimension);
  }
}

TEST(MinMax, RandomVectorMatchesElementwiseComparison) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> small(-3, 3);  // plenty of ties
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(1024);
    for (double& x : v) x = small(rng);
    const Barcode b = minmax_barcode(v);
    for (std::size_t i = 0; i + 1 < v.size(); ++i) {
      ASSERT_EQ(b.bit(i), v[i + 1] > v[i]) << "bit " << i;
    }
  }
}

TEST(Hamming, Examples) {
  EXPECT_EQ(hamming(from_string("0110"), from_string("0110")), 0U);
  EXPECT_EQ(hamming(from_string("0110"), from_string("0011")), 2U);
  EXPECT_THROW(hamming(from_string("01"), from_string("011")), Error);
}

TEST(Hamming, RandomPairsMatchPerBitLoop) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 500; ++trial) {
    const Bits a = testing::random_bits(rng, 1023);
    const Bits b = testing::random_bits(rng, 1023);
    ASSERT_EQ(hamming(testing::pack(a), testing::pack(b)),
              testing::naive_hamming(a, b));
  }
}

TEST(Bunch, SingletonsGiveHamming) {
  std::mt19937_64 rng(7);
  const Bits a = testing::random_bits(rng, 100);
  const Bits b = testing::random_bits(rng, 100);
  EXPECT_EQ(bob_distance(bunch_of({a}), bunch_of({b})),
            static_cast<double>(testing::naive_hamming(a, b)));
}

TEST(Bunch, SubsetIsZero) {
  std::mt19937_64 rng(8);
  std::vector<Bits> target;
  for (int i = 0; i < 6; ++i) target.push_back(testing::random_bits(rng, 64));
  const std::vector<Bits> query = {target[4], target[1], target[2]};
  EXPECT_EQ(bob_distance(bunch_of(query), bunch_of(target)), 0.0);
}

TEST(Bunch, ThreeVersusFourByHand) {
  // Query minima against the target are 1, 3 and 0: median 1.
  const std::vector<Bits> query = {{1, 1, 0, 0, 0, 0},
                                   {1, 1, 1, 1, 1, 1},
                                   {0, 1, 0, 1, 0, 1}};
  const std::vector<Bits> target = {{1, 0, 0, 0, 0, 0},
                                    {0, 1, 0, 1, 0, 1},
                                    {1, 1, 1, 0, 0, 0},
                                    {0, 0, 0, 0, 0, 0}};
  EXPECT_EQ(bob_distance(bunch_of(query), bunch_of(target)), 1.0);
  EXPECT_EQ(testing::naive_bob_distance(query, target), 1.0);
}

TEST(Bunch, EvenCountAveragesMiddlePair) {
  // Minima 0 and 3 -> 1.5.
  const std::vector<Bits> query = {{0, 0, 0}, {1, 1, 1}};
  const std::vector<Bits> target = {{0, 0, 0}};
  EXPECT_EQ(bob_distance(bunch_of(query), bunch_of(target)), 1.5);
}

TEST(Bunch, NotSymmetric) {
  const std::vector<Bits> a = {{0, 0, 0, 0}};
  const std::vector<Bits> b = {{0, 0, 0, 0}, {1, 1, 1, 1}, {1, 1, 1, 0}};
  EXPECT_EQ(bob_distance(bunch_of(a), bunch_of(b)), 0.0);
  EXPECT_EQ(bob_distance(bunch_of(b), bunch_of(a)), 3.0);
}

TEST(Bunch, RandomPairsMatchExhaustiveOracle) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Bits> q, t;
    const std::size_t nq = 1 + rng() % 12, nt = 1 + rng() % 12;
    for (std::size_t i = 0; i < nq; ++i) q.push_back(testing::random_bits(rng, 70));
    for (std::size_t i = 0; i < nt; ++i) t.push_back(testing::random_bits(rng, 70));
    ASSERT_EQ(bob_distance(bunch_of(q), bunch_of(t)),
              testing::naive_bob_distance(q, t));
  }
}

TEST(Bunch, Errors) {
  BunchOfBarcodes empty("e", 8);
  BunchOfBarcodes one("o", 8);
  one.add(Barcode(8));
  try {
    bob_distance(empty, one);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyInput);
  }
  BunchOfBarcodes wide("w", 9);
  wide.add(Barcode(9));
  try {
    bob_distance(one, wide);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDimension);
  }
  EXPECT_THROW(one.add(Barcode(9)), Error);
}

TEST(Bunch, KeepsOrigins) {
  BunchOfBarcodes b("s", 4);
  b.add(from_string("1010"), {3, 4});
  b.add(from_string("0101"), {5, 6});
  ASSERT_EQ(b.size(), 2U);
  EXPECT_EQ(b.origin(1), (PatchCoord{5, 6}));
  EXPECT_EQ(hamming(b.barcode(0), b.barcode(1)), 4U);
}

}  // namespace
}  // namespace bob
