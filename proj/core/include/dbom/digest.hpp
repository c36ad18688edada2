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

#ifndef DBOM_DIGEST_HPP_
#define DBOM_DIGEST_HPP_

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace dbom {

/// A SHA-256 digest in lowercase hex. The algorithm is fixed; the JSON form
/// still names it so documents stay self-describing.
class Digest {
 public:
  static constexpr std::string_view kAlgorithm = "sha256";
  static constexpr std::size_t kHexLength = 64;

  Digest() = default;

  static Digest of(std::span<const unsigned char> data);
  static Digest of(std::string_view data);

  /// Nullopt unless `hex` is exactly 64 characters from [0-9a-f].
  static std::optional<Digest> from_hex(std::string_view hex);
  static bool is_valid_hex(std::string_view hex);

  const std::string& hex() const { return hex_; }
  bool empty() const { return hex_.empty(); }

  friend bool operator==(const Digest&, const Digest&) = default;

 private:
  explicit Digest(std::string hex) : hex_(std::move(hex)) {}
  std::string hex_;
};

void to_json(nlohmann::json& j, const Digest& d);
void from_json(const nlohmann::json& j, Digest& d);

}  // namespace dbom

#endif  // DBOM_DIGEST_HPP_
