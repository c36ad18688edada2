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

#include "dbom/decimal.hpp"

#include <charconv>
#include <cmath>
#include <limits>

#include "dbom/error.hpp"
#include "int128.hpp"

namespace dbom {

namespace {

constexpr std::int64_t kMaxUnits = std::numeric_limits<std::int64_t>::max();

bool is_digit(char c) { return c >= '0' && c <= '9'; }

// Digits of a plain decimal literal with an exact half-even rounding to nine
// fractional digits. Returns nullopt on syntax error or overflow.
std::optional<Decimal> round_literal(std::string_view text) {
  if (text.empty()) return std::nullopt;
  bool negative = false;
  std::size_t pos = 0;
  if (text[0] == '-' || text[0] == '+') {
    negative = text[0] == '-';
    pos = 1;
  }
  std::string_view int_part;
  std::string_view frac_part;
  const auto dot = text.find('.', pos);
  if (dot == std::string_view::npos) {
    int_part = text.substr(pos);
  } else {
    int_part = text.substr(pos, dot - pos);
    frac_part = text.substr(dot + 1);
    if (frac_part.empty()) return std::nullopt;
  }
  if (int_part.empty()) return std::nullopt;
  for (char c : int_part)
    if (!is_digit(c)) return std::nullopt;
  for (char c : frac_part)
    if (!is_digit(c)) return std::nullopt;

  internal::u128 units = 0;
  for (char c : int_part) {
    units = units * 10 + static_cast<unsigned>(c - '0');
    if (units > static_cast<internal::u128>(kMaxUnits)) return std::nullopt;
  }
  for (int i = 0; i < Decimal::kFractionDigits; ++i) {
    const unsigned digit =
        i < static_cast<int>(frac_part.size()) ? static_cast<unsigned>(frac_part[i] - '0') : 0U;
    units = units * 10 + digit;
  }
  if (frac_part.size() > static_cast<std::size_t>(Decimal::kFractionDigits)) {
    const auto rest = frac_part.substr(Decimal::kFractionDigits);
    const char first = rest[0];
    const bool tail_nonzero = rest.substr(1).find_first_not_of('0') != std::string_view::npos;
    bool round_up = false;
    if (first > '5') {
      round_up = true;
    } else if (first == '5') {
      round_up = tail_nonzero || (units % 2 == 1);
    }
    if (round_up) ++units;
  }
  if (units > static_cast<internal::u128>(kMaxUnits)) return std::nullopt;
  const auto signed_units = static_cast<std::int64_t>(units);
  return Decimal::from_units(negative ? -signed_units : signed_units);
}

}  // namespace

Decimal Decimal::from_double(double value) {
  if (!std::isfinite(value) || std::fabs(value) >= 9.0e9) {
    throw Error(ErrorCode::kFormat, "value not representable as nine-digit decimal");
  }
  // std::to_chars in fixed mode prints the exact binary value correctly
  // rounded (ties to even), which is the rule we need.
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, kFractionDigits);
  if (res.ec != std::errc{}) {
    throw Error(ErrorCode::kFormat, "decimal formatting failed");
  }
  auto parsed = round_literal(std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)));
  if (!parsed) throw Error(ErrorCode::kFormat, "decimal formatting failed");
  return *parsed;
}

Decimal Decimal::ratio(std::uint64_t num, std::uint64_t den) {
  if (den == 0) throw Error(ErrorCode::kFormat, "decimal ratio with zero denominator");
  const internal::u128 scaled = static_cast<internal::u128>(num) * kScale;
  internal::u128 q = scaled / den;
  const internal::u128 r = scaled % den;
  const internal::u128 twice = r * 2;
  if (twice > den || (twice == den && q % 2 == 1)) ++q;
  if (q > static_cast<internal::u128>(kMaxUnits)) {
    throw Error(ErrorCode::kFormat, "decimal ratio overflow");
  }
  return from_units(static_cast<std::int64_t>(q));
}

std::optional<Decimal> Decimal::parse(std::string_view text) {
  std::size_t pos = 0;
  const bool negative = !text.empty() && text[0] == '-';
  if (negative) pos = 1;
  const auto dot = text.find('.', pos);
  if (dot == std::string_view::npos) return std::nullopt;
  const auto int_part = text.substr(pos, dot - pos);
  const auto frac_part = text.substr(dot + 1);
  if (int_part.empty() || frac_part.size() != static_cast<std::size_t>(kFractionDigits)) return std::nullopt;
  if (int_part.size() > 1 && int_part[0] == '0') return std::nullopt;
  if (!is_digit(int_part[0])) return std::nullopt;
  auto value = round_literal(text);
  if (!value) return std::nullopt;
  if (negative && value->units() == 0) return std::nullopt;
  return value;
}

std::optional<Decimal> Decimal::parse_lenient(std::string_view text) { return round_literal(text); }

std::string Decimal::to_string() const {
  const bool negative = units_ < 0;
  // Magnitude as unsigned to survive INT64_MIN.
  const std::uint64_t magnitude =
      negative ? static_cast<std::uint64_t>(-(units_ + 1)) + 1 : static_cast<std::uint64_t>(units_);
  const std::uint64_t int_part = magnitude / static_cast<std::uint64_t>(kScale);
  const std::uint64_t frac_part = magnitude % static_cast<std::uint64_t>(kScale);
  std::string frac = std::to_string(frac_part);
  frac.insert(0, static_cast<std::size_t>(kFractionDigits) - frac.size(), '0');
  std::string out = negative ? "-" : "";
  out += std::to_string(int_part);
  out += '.';
  out += frac;
  return out;
}

}  // namespace dbom
