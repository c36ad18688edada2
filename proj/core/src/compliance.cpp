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

#include "dbom/compliance.hpp"

#include <cctype>

#include "dbom/error.hpp"

namespace dbom {

using nlohmann::json;

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool is_number_literal(std::string_view s) {
  std::size_t i = 0;
  if (i < s.size() && s[i] == '-') ++i;
  std::size_t int_start = i;
  while (i < s.size() && is_digit(s[i])) ++i;
  if (i == int_start) return false;
  if (i == s.size()) return true;
  if (s[i] != '.') return false;
  std::size_t frac_start = ++i;
  while (i < s.size() && is_digit(s[i])) ++i;
  return i == s.size() && i > frac_start;
}

bool is_path_segment_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

bool valid_path(std::string_view p) {
  if (p.empty() || p.front() == '.' || p.back() == '.') return false;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == '.') {
      if (p[i - 1] == '.') return false;
    } else if (!is_path_segment_char(p[i])) {
      return false;
    }
  }
  return true;
}

[[noreturn]] void syntax(std::size_t line, const std::string& msg) {
  throw Error(ErrorCode::kRuleSyntax, "line " + std::to_string(line) + ": " + msg);
}

// Strips a trailing comment; '#' inside a double-quoted literal is kept.
std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted && c == '\\') {
      ++i;
    } else if (c == '"') {
      quoted = !quoted;
    } else if (c == '#' && !quoted) {
      return line.substr(0, i);
    }
  }
  return line;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string_view next_token(std::string_view& rest) {
  rest = trim(rest);
  std::size_t i = 0;
  while (i < rest.size() && !std::isspace(static_cast<unsigned char>(rest[i]))) ++i;
  auto tok = rest.substr(0, i);
  rest.remove_prefix(i);
  return tok;
}

const json* resolve(const json& doc, std::string_view path) {
  const json* node = &doc;
  std::size_t start = 0;
  while (start <= path.size()) {
    auto dot = path.find('.', start);
    auto seg = path.substr(start, dot == path.npos ? path.npos : dot - start);
    if (node->is_object()) {
      auto it = node->find(std::string(seg));
      if (it == node->end()) return nullptr;
      node = &*it;
    } else if (node->is_array()) {
      if (seg.empty() || seg.size() > 18) return nullptr;
      for (char c : seg) {
        if (!is_digit(c)) return nullptr;
      }
      auto idx = std::stoull(std::string(seg));
      if (idx >= node->size()) return nullptr;
      node = &(*node)[idx];
    } else {
      return nullptr;
    }
    if (dot == path.npos) break;
    start = dot + 1;
  }
  return node;
}

// Numeric view of a scalar: JSON integers and decimal-text strings.
std::optional<std::string> numeric_text(const json& v) {
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_string() && is_number_literal(v.get_ref<const std::string&>())) return v.get<std::string>();
  return std::nullopt;
}

std::string observed_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_object()) return "<object>";
  if (v.is_array()) return "<list>";
  return v.dump();
}

}  // namespace

std::string_view to_string(Comparator c) {
  switch (c) {
    case Comparator::kGe: return ">=";
    case Comparator::kLe: return "<=";
    case Comparator::kGt: return ">";
    case Comparator::kLt: return "<";
    case Comparator::kEq: return "==";
    case Comparator::kNe: return "!=";
    case Comparator::kExists: return "exists";
  }
  return "?";
}

std::optional<Comparator> comparator_from_string(std::string_view t) {
  for (auto c : {Comparator::kGe, Comparator::kLe, Comparator::kGt, Comparator::kLt, Comparator::kEq, Comparator::kNe,
                 Comparator::kExists}) {
    if (to_string(c) == t) return c;
  }
  return std::nullopt;
}

std::string Rule::text() const {
  std::string out = path + " " + std::string(to_string(comparator));
  if (literal_kind == LiteralKind::kNumber) {
    out += " " + literal;
  } else if (literal_kind == LiteralKind::kText) {
    out += " " + json(literal).dump();
  }
  return out;
}

RuleSet compile_rules(std::string_view text) {
  RuleSet set;
  std::size_t lineno = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    std::string_view raw = text.substr(pos, nl == text.npos ? text.npos : nl - pos);
    pos = nl == text.npos ? text.size() + 1 : nl + 1;
    ++lineno;
    std::string_view rest = trim(strip_comment(raw));
    if (rest.empty()) continue;

    Rule rule;
    rule.line = lineno;
    auto path = next_token(rest);
    if (!valid_path(path)) syntax(lineno, "invalid field path '" + std::string(path) + "'");
    rule.path = std::string(path);
    auto cmp_tok = next_token(rest);
    if (cmp_tok.empty()) syntax(lineno, "missing comparator");
    auto cmp = comparator_from_string(cmp_tok);
    if (!cmp) syntax(lineno, "unknown comparator '" + std::string(cmp_tok) + "'");
    rule.comparator = *cmp;
    rest = trim(rest);

    if (rule.comparator == Comparator::kExists) {
      if (!rest.empty()) syntax(lineno, "'exists' takes no literal");
    } else if (rest.empty()) {
      syntax(lineno, "missing literal");
    } else if (rest.front() == '"') {
      std::string value;
      std::size_t i = 1;
      bool closed = false;
      for (; i < rest.size(); ++i) {
        char c = rest[i];
        if (c == '\\') {
          if (i + 1 >= rest.size() || (rest[i + 1] != '"' && rest[i + 1] != '\\')) {
            syntax(lineno, "bad escape in string literal");
          }
          value += rest[++i];
        } else if (c == '"') {
          closed = true;
          ++i;
          break;
        } else {
          value += c;
        }
      }
      if (!closed) syntax(lineno, "unterminated string literal");
      if (!trim(rest.substr(i)).empty()) syntax(lineno, "unexpected text after literal");
      rule.literal_kind = LiteralKind::kText;
      rule.literal = std::move(value);
    } else {
      auto lit = next_token(rest);
      if (!trim(rest).empty()) syntax(lineno, "unexpected text after literal");
      rule.literal = std::string(lit);
      rule.literal_kind = is_number_literal(lit) ? LiteralKind::kNumber : LiteralKind::kText;
    }
    bool ordering = rule.comparator == Comparator::kGe || rule.comparator == Comparator::kLe ||
                    rule.comparator == Comparator::kGt || rule.comparator == Comparator::kLt;
    if (ordering && rule.literal_kind != LiteralKind::kNumber) {
      syntax(lineno, "comparator '" + std::string(to_string(rule.comparator)) + "' needs a numeric literal");
    }
    set.rules.push_back(std::move(rule));
  }
  return set;
}

std::optional<int> compare_decimal_text(std::string_view a, std::string_view b) {
  if (!is_number_literal(a) || !is_number_literal(b)) return std::nullopt;
  struct Parts {
    bool negative;
    std::string integer;
    std::string fraction;
  };
  auto split = [](std::string_view s) {
    Parts p{false, {}, {}};
    if (s.front() == '-') {
      p.negative = true;
      s.remove_prefix(1);
    }
    auto dot = s.find('.');
    p.integer = std::string(s.substr(0, dot));
    p.fraction = dot == s.npos ? std::string() : std::string(s.substr(dot + 1));
    p.integer.erase(0, std::min(p.integer.find_first_not_of('0'), p.integer.size()));
    while (!p.fraction.empty() && p.fraction.back() == '0') p.fraction.pop_back();
    if (p.integer.empty() && p.fraction.empty()) p.negative = false;
    return p;
  };
  auto x = split(a);
  auto y = split(b);
  if (x.negative != y.negative) return x.negative ? -1 : 1;
  int magnitude = 0;
  if (x.integer.size() != y.integer.size()) {
    magnitude = x.integer.size() < y.integer.size() ? -1 : 1;
  } else if (int c = x.integer.compare(y.integer); c != 0) {
    magnitude = c < 0 ? -1 : 1;
  } else {
    auto n = std::max(x.fraction.size(), y.fraction.size());
    x.fraction.resize(n, '0');
    y.fraction.resize(n, '0');
    int f = x.fraction.compare(y.fraction);
    magnitude = f < 0 ? -1 : (f > 0 ? 1 : 0);
  }
  return x.negative ? -magnitude : magnitude;
}

void to_json(json& j, const ComplianceReport& r) {
  json violations = json::array();
  for (const auto& v : r.violations) violations.push_back({{"rule", v.rule}, {"observed", v.observed}});
  j = {{"pass", r.pass()}, {"violations", std::move(violations)}};
}

ComplianceReport compliance_check(const json& doc, const RuleSet& rules) {
  ComplianceReport report;
  for (const auto& rule : rules.rules) {
    const json* node = resolve(doc, rule.path);
    if (!node) {
      report.violations.push_back({rule.text(), "missing field"});
      continue;
    }
    if (rule.comparator == Comparator::kExists) continue;
    const std::string observed = observed_text(*node);
    if (node->is_structured()) {
      report.violations.push_back({rule.text(), observed});
      continue;
    }
    bool ok = false;
    auto num = numeric_text(*node);
    if (rule.literal_kind == LiteralKind::kNumber && num) {
      int c = *compare_decimal_text(*num, rule.literal);
      switch (rule.comparator) {
        case Comparator::kGe: ok = c >= 0; break;
        case Comparator::kLe: ok = c <= 0; break;
        case Comparator::kGt: ok = c > 0; break;
        case Comparator::kLt: ok = c < 0; break;
        case Comparator::kEq: ok = c == 0; break;
        case Comparator::kNe: ok = c != 0; break;
        case Comparator::kExists: ok = true; break;
      }
    } else if (rule.comparator == Comparator::kEq) {
      ok = observed == rule.literal;
    } else if (rule.comparator == Comparator::kNe) {
      ok = observed != rule.literal;
    }
    // An ordering rule against a non-numeric field stays a violation.
    if (!ok) report.violations.push_back({rule.text(), observed});
  }
  return report;
}

}  // namespace dbom
