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

#ifndef DBOM_ENCODING_HPP_
#define DBOM_ENCODING_HPP_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dbom {

/// Standard-alphabet base64 with '=' padding.
std::string base64_encode(std::span<const unsigned char> data);
std::string base64_encode(std::string_view data);

/// Strict decode: rejects whitespace, missing padding and non-zero trailing
/// bits, so every byte string has exactly one accepted encoding.
std::optional<std::string> base64_decode(std::string_view text);

std::string hex_encode(std::span<const unsigned char> data);

bool is_valid_utf8(std::string_view text);

}  // namespace dbom

#endif  // DBOM_ENCODING_HPP_
