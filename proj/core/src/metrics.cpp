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

#include "dbom/metrics.hpp"

#include <string>

#include "dbom/error.hpp"

namespace dbom {

namespace {

nlohmann::json rate_to_json(const std::optional<Decimal>& rate) {
  return rate ? nlohmann::json(rate->to_string()) : nlohmann::json(std::string(kUndefinedRate));
}

std::optional<Decimal> rate_from_json(const nlohmann::json& j, const char* name) {
  const auto& text = j.get_ref<const std::string&>();
  if (text == kUndefinedRate) return std::nullopt;
  auto d = Decimal::parse(text);
  if (!d) throw Error(ErrorCode::kFormat, std::string("metrics: malformed ") + name);
  return d;
}

}  // namespace

Metrics metrics_from_counts(std::uint64_t tp, std::uint64_t fp, std::uint64_t tn, std::uint64_t fn) {
  const std::uint64_t total = tp + fp + tn + fn;
  if (total == 0) throw Error(ErrorCode::kMetrics, "metrics: empty input");
  Metrics m;
  m.tp = tp;
  m.fp = fp;
  m.tn = tn;
  m.fn = fn;
  m.accuracy = Decimal::ratio(tp + tn, total);
  if (tp + fn != 0) m.sensitivity = Decimal::ratio(tp, tp + fn);
  if (tn + fp != 0) m.specificity = Decimal::ratio(tn, tn + fp);
  return m;
}

Metrics compute_metrics(std::span<const Decimal> probabilities, std::span<const std::uint8_t> labels,
                        Decimal threshold) {
  if (probabilities.empty()) throw Error(ErrorCode::kMetrics, "metrics: empty input");
  if (probabilities.size() != labels.size()) {
    throw Error(ErrorCode::kMetrics, "metrics: predictions and labels differ in length");
  }
  std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    const bool predicted = probabilities[i] >= threshold;
    const bool actual = labels[i] != 0;
    if (predicted && actual) ++tp;
    else if (predicted) ++fp;
    else if (actual) ++fn;
    else ++tn;
  }
  return metrics_from_counts(tp, fp, tn, fn);
}

void to_json(nlohmann::json& j, const Metrics& m) {
  j = nlohmann::json{{"accuracy", m.accuracy.to_string()},
                     {"sensitivity", rate_to_json(m.sensitivity)},
                     {"specificity", rate_to_json(m.specificity)},
                     {"true_positives", m.tp},
                     {"false_positives", m.fp},
                     {"true_negatives", m.tn},
                     {"false_negatives", m.fn}};
}

void from_json(const nlohmann::json& j, Metrics& m) {
  auto acc = Decimal::parse(j.at("accuracy").get<std::string>());
  if (!acc) throw Error(ErrorCode::kFormat, "metrics: malformed accuracy");
  m.accuracy = *acc;
  m.sensitivity = rate_from_json(j.at("sensitivity"), "sensitivity");
  m.specificity = rate_from_json(j.at("specificity"), "specificity");
  m.tp = j.at("true_positives").get<std::uint64_t>();
  m.fp = j.at("false_positives").get<std::uint64_t>();
  m.tn = j.at("true_negatives").get<std::uint64_t>();
  m.fn = j.at("false_negatives").get<std::uint64_t>();
}

}  // namespace dbom
