/*
 * Copyright 2026 The DBOM Toolkit Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <random>

#include "dbom/decimal.hpp"
#include "dbom/error.hpp"

namespace dbom {
namespace {

TEST(Decimal, FormatsNineFractionDigits) {
  EXPECT_EQ(Decimal::from_units(730'000'000).to_string(), "0.730000000");
  EXPECT_EQ(Decimal::from_units(-1).to_string(), "-0.000000001");
  EXPECT_EQ(Decimal::from_integer(12).to_string(), "12.000000000");
  EXPECT_EQ(Decimal().to_string(), "0.000000000");
}

TEST(Decimal, StrictParseAcceptsOnlyCanonicalText) {
  EXPECT_EQ(Decimal::parse("0.730000000")->units(), 730'000'000);
  EXPECT_EQ(Decimal::parse("-1.500000000")->units(), -1'500'000'000);
  for (const char* bad : {"0.73", "+0.000000000", "-0.000000000", "00.000000000", "1.0000000000", ".000000000",
                          "1e-4", "", "0.00000000a", " 0.000000000"}) {
    EXPECT_FALSE(Decimal::parse(bad).has_value()) << bad;
  }
}

TEST(Decimal, LenientParseRoundsHalfEven) {
  EXPECT_EQ(Decimal::parse_lenient("0.2")->to_string(), "0.200000000");
  EXPECT_EQ(Decimal::parse_lenient("0.0000000005")->to_string(), "0.000000000");
  EXPECT_EQ(Decimal::parse_lenient("0.0000000015")->to_string(), "0.000000002");
  EXPECT_EQ(Decimal::parse_lenient("-0.0000000025")->to_string(), "-0.000000002");
  EXPECT_EQ(Decimal::parse_lenient("12")->to_string(), "12.000000000");
  EXPECT_FALSE(Decimal::parse_lenient("1e-4").has_value());
}

TEST(Decimal, FromDoubleRoundsExactBinaryValueHalfEven) {
  // Both inputs are exact binary fractions sitting on a tie at nine digits.
  EXPECT_EQ(Decimal::from_double(0.0009765625).to_string(), "0.000976562");
  EXPECT_EQ(Decimal::from_double(0.0029296875).to_string(), "0.002929688");
  EXPECT_EQ(Decimal::from_double(0.73).to_string(), "0.730000000");
  EXPECT_THROW(Decimal::from_double(std::nan("")), Error);
  EXPECT_THROW(Decimal::from_double(1e300), Error);
}

TEST(Decimal, RatioIsExactHalfEven) {
  EXPECT_EQ(Decimal::ratio(17, 20).to_string(), "0.850000000");
  EXPECT_EQ(Decimal::ratio(1, 3).to_string(), "0.333333333");
  EXPECT_EQ(Decimal::ratio(2, 3).to_string(), "0.666666667");
  // 1/2e9 = 0.0000000005 exactly: tie rounds to even (0).
  EXPECT_EQ(Decimal::ratio(1, 2'000'000'000).to_string(), "0.000000000");
  EXPECT_EQ(Decimal::ratio(3, 2'000'000'000).to_string(), "0.000000002");
}

TEST(Decimal, TextRoundTripProperty) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int64_t> dist(-50'000'000'000'000LL, 50'000'000'000'000LL);
  for (int i = 0; i < 2000; ++i) {
    auto d = Decimal::from_units(dist(rng));
    auto back = Decimal::parse(d.to_string());
    ASSERT_TRUE(back.has_value()) << d.to_string();
    EXPECT_EQ(*back, d);
  }
}

TEST(Decimal, ArithmeticIsExact) {
  auto a = *Decimal::parse("0.100000000");
  auto b = *Decimal::parse("0.200000000");
  EXPECT_EQ((a + b).to_string(), "0.300000000");
  EXPECT_EQ((a - b).abs().to_string(), "0.100000000");
}

}  // namespace
}  // namespace dbom
