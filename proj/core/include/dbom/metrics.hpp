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

#ifndef DBOM_METRICS_HPP_
#define DBOM_METRICS_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include <nlohmann/json.hpp>

#include "dbom/decimal.hpp"

namespace dbom {

/// Text stored in place of a rate whose denominator is zero.
inline constexpr std::string_view kUndefinedRate = "undefined";

/// Binary confusion-matrix summary; the positive class is "poisonous".
struct Metrics {
  Decimal accuracy;
  std::optional<Decimal> sensitivity;  // tp / (tp + fn), nullopt if no positives
  std::optional<Decimal> specificity;  // tn / (tn + fp), nullopt if no negatives
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

/// Scores `probabilities` (of the poisonous class) against `labels`
/// (1 = poisonous). A prediction is positive iff p >= threshold.
/// Throws Error(kMetrics) on empty or mismatched input.
Metrics compute_metrics(std::span<const Decimal> probabilities, std::span<const std::uint8_t> labels,
                        Decimal threshold);

/// Metrics from raw counts; rates rounded half-even to nine digits.
Metrics metrics_from_counts(std::uint64_t tp, std::uint64_t fp, std::uint64_t tn, std::uint64_t fn);

void to_json(nlohmann::json& j, const Metrics& m);
void from_json(const nlohmann::json& j, Metrics& m);

}  // namespace dbom

#endif  // DBOM_METRICS_HPP_
