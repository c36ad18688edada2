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

#ifndef DBOM_CANONICAL_HPP_
#define DBOM_CANONICAL_HPP_

#include <string>

#include <nlohmann/json.hpp>

#include "dbom/digest.hpp"

namespace dbom {

/// Canonical UTF-8 bytes of a BOM document: object keys sorted by code point,
/// no insignificant whitespace, arrays in the given order, integers in plain
/// decimal, strings with the minimal JSON escape set.
///
/// Raw floating-point numbers, binary values and invalid UTF-8 are refused
/// with Error(kCanonicalization) naming the dotted path of the offending node.
std::string canonicalize(const nlohmann::json& doc);

/// digest(canonicalize(doc))
Digest canonical_digest(const nlohmann::json& doc);

/// Strict JSON parse used for every BOM-bearing input. Throws Error(kFormat).
nlohmann::json parse_json(std::string_view text);

}  // namespace dbom

#endif  // DBOM_CANONICAL_HPP_
