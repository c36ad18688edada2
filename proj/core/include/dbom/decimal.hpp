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

#ifndef DBOM_DECIMAL_HPP_
#define DBOM_DECIMAL_HPP_

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace dbom {

/// Fixed-point real with exactly nine fractional digits.
///
/// Every real-valued BOM field is stored as the decimal text of one of these
/// values (e.g. "0.730000000"), so hashing never depends on how a platform
/// formats floating point. Arithmetic on Decimal is exact; the only rounding
/// happens when converting from double or from longer decimal text, and it is
/// always round-half-even.
class Decimal {
 public:
  static constexpr int kFractionDigits = 9;
  static constexpr std::int64_t kScale = 1'000'000'000;

  constexpr Decimal() = default;

  static constexpr Decimal from_units(std::int64_t units) {
    Decimal d;
    d.units_ = units;
    return d;
  }
  static constexpr Decimal from_integer(std::int64_t value) {
    return from_units(value * kScale);
  }

  /// Rounds the exact binary value of `value` half-even to nine digits.
  /// Throws Error(kFormat) for non-finite or out-of-range input.
  static Decimal from_double(double value);

  /// Exact num/den rounded half-even. `den` must be non-zero.
  static Decimal ratio(std::uint64_t num, std::uint64_t den);

  /// Strict parse of the canonical text form: optional '-', integer part
  /// without leading zeros, '.', exactly nine digits. "-0.000000000" is
  /// rejected because it is not the canonical spelling of zero.
  static std::optional<Decimal> parse(std::string_view text);

  /// Accepts any plain decimal literal ("0.2", "1e-4" is NOT accepted,
  /// "12", "-3.14159265358979") and rounds half-even to nine digits.
  static std::optional<Decimal> parse_lenient(std::string_view text);

  std::string to_string() const;
  double to_double() const { return static_cast<double>(units_) / kScale; }
  constexpr std::int64_t units() const { return units_; }

  constexpr Decimal abs() const { return from_units(units_ < 0 ? -units_ : units_); }

  friend constexpr Decimal operator+(Decimal a, Decimal b) { return from_units(a.units_ + b.units_); }
  friend constexpr Decimal operator-(Decimal a, Decimal b) { return from_units(a.units_ - b.units_); }
  constexpr Decimal operator-() const { return from_units(-units_); }
  Decimal& operator+=(Decimal other) {
    units_ += other.units_;
    return *this;
  }

  friend constexpr auto operator<=>(const Decimal&, const Decimal&) = default;

 private:
  std::int64_t units_ = 0;
};

}  // namespace dbom

#endif  // DBOM_DECIMAL_HPP_
