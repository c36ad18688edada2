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

#ifndef DBOM_COMPLIANCE_HPP_
#define DBOM_COMPLIANCE_HPP_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace dbom {

enum class Comparator { kGe, kLe, kGt, kLt, kEq, kNe, kExists };

std::string_view to_string(Comparator c);
std::optional<Comparator> comparator_from_string(std::string_view text);

enum class LiteralKind { kNone, kNumber, kText };

/// PATH COMPARATOR LITERAL, e.g. `performance_metrics.final_test.accuracy >= 0.95`.
/// Path segments are object keys, or array indices when all digits.
struct Rule {
  std::string path;
  Comparator comparator = Comparator::kExists;
  LiteralKind literal_kind = LiteralKind::kNone;
  std::string literal;  // numeric text or unquoted string value
  std::size_t line = 0;

  /// Source form, used in reports.
  std::string text() const;
  friend bool operator==(const Rule&, const Rule&) = default;
};

struct RuleSet {
  std::vector<Rule> rules;
};

/// One rule per non-blank line; '#' outside a quoted literal starts a
/// comment. Literals are numbers (-?digits[.digits]), double-quoted strings
/// with \" and \\ escapes, or bare tokens. Ordering comparators need a numeric
/// literal; `exists` takes none. Throws Error(kRuleSyntax) naming the line.
RuleSet compile_rules(std::string_view text);

struct ComplianceViolation {
  std::string rule;
  std::string observed;  // field value as text, or "missing field"
  friend bool operator==(const ComplianceViolation&, const ComplianceViolation&) = default;
};

struct ComplianceReport {
  std::vector<ComplianceViolation> violations;
  bool pass() const { return violations.empty(); }
};

void to_json(nlohmann::json& j, const ComplianceReport& r);

/// Absent paths violate every rule; objects and lists only satisfy `exists`.
/// Numeric comparisons are exact on the decimal text (JSON integers and
/// decimal-text strings both count as numbers).
ComplianceReport compliance_check(const nlohmann::json& doc, const RuleSet& rules);

/// Exact comparison of two plain decimal literals (-?digits[.digits]).
/// Returns nullopt if either is not such a literal.
std::optional<int> compare_decimal_text(std::string_view a, std::string_view b);

}  // namespace dbom

#endif  // DBOM_COMPLIANCE_HPP_
