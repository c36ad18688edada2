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

#ifndef DBOM_VALIDATE_HPP_
#define DBOM_VALIDATE_HPP_

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dbom/bom.hpp"

namespace dbom {

struct Violation {
  std::string path;
  std::string message;
  friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool valid() const { return violations.empty(); }
  /// "path: message; path: message"
  std::string summary() const;
};

void to_json(nlohmann::json& j, const ValidationReport& r);

/// Checks every required field, its type and every structural invariant of
/// the document kind. Problems are reported, never thrown.
ValidationReport validate_bom(const nlohmann::json& doc, BomKind kind);

/// Guesses the kind of a parsed payload from its top-level sections.
std::optional<BomKind> detect_bom_kind(const nlohmann::json& doc);

/// round-half-even(sum / n) computed exactly on the fixed-point units.
Decimal exact_mean(std::span<const Decimal> values);

/// Names of the mandatory pathway steps, in the order they must appear.
inline constexpr std::array<std::string_view, 4> kRequiredPathwaySteps = {"decode-input", "verify-model",
                                                                          "encode", "predict"};

}  // namespace dbom

#endif  // DBOM_VALIDATE_HPP_
