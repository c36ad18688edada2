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

#include "dbom/digest.hpp"

#include <sodium.h>

#include <array>

#include "dbom/encoding.hpp"
#include "dbom/error.hpp"
#include "sodium_init.hpp"

namespace dbom {

Digest Digest::of(std::span<const unsigned char> data) {
  internal::ensure_sodium();
  std::array<unsigned char, crypto_hash_sha256_BYTES> out{};
  crypto_hash_sha256(out.data(), data.data(), data.size());
  return Digest(hex_encode(out));
}

Digest Digest::of(std::string_view data) {
  return of(std::span<const unsigned char>(reinterpret_cast<const unsigned char*>(data.data()), data.size()));
}

bool Digest::is_valid_hex(std::string_view hex) {
  if (hex.size() != kHexLength) return false;
  for (char c : hex) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

std::optional<Digest> Digest::from_hex(std::string_view hex) {
  if (!is_valid_hex(hex)) return std::nullopt;
  return Digest(std::string(hex));
}

void to_json(nlohmann::json& j, const Digest& d) {
  j = nlohmann::json{{"algorithm", Digest::kAlgorithm}, {"hex", d.hex()}};
}

void from_json(const nlohmann::json& j, Digest& d) {
  if (!j.is_object() || j.value("algorithm", "") != Digest::kAlgorithm) {
    throw Error(ErrorCode::kFormat, "digest: expected sha256 digest object");
  }
  auto parsed = Digest::from_hex(j.at("hex").get<std::string>());
  if (!parsed) throw Error(ErrorCode::kFormat, "digest: malformed hex");
  d = *parsed;
}

}  // namespace dbom
