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

#ifndef DBOM_ENVELOPE_HPP_
#define DBOM_ENVELOPE_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dbom/digest.hpp"

namespace dbom {

inline constexpr std::string_view kDbomPayloadType = "application/vnd.dbom+json";

struct EnvelopeSignature {
  std::string keyid;
  std::string sig;  // base64 Ed25519 signature
  friend bool operator==(const EnvelopeSignature&, const EnvelopeSignature&) = default;
};

/// DSSE envelope. `payload` holds the base64 of the canonical BOM bytes.
struct Envelope {
  std::string payload_type{kDbomPayloadType};
  std::string payload;
  std::vector<EnvelopeSignature> signatures;
  friend bool operator==(const Envelope&, const Envelope&) = default;
};

/// Wire form: {"payloadType", "payload", "signatures": [{"keyid", "sig"}]}.
void to_json(nlohmann::json& j, const Envelope& e);
/// Throws Error(kFormat) on missing or ill-typed members.
Envelope envelope_from_json(const nlohmann::json& j);
/// Parses envelope file bytes. Throws Error(kFormat).
Envelope parse_envelope(std::string_view text);
/// Compact canonical serialization used for envelope files.
std::string serialize_envelope(const Envelope& e);

/// DSSE pre-authentication encoding:
/// "DSSEv1" SP len(type) SP type SP len(payload) SP payload.
std::string pae_encode(std::string_view payload_type, std::string_view payload);

/// Published half of an issued key.
struct KeyRecord {
  std::string keyid;            // first 16 hex chars of sha256(verifying key)
  std::string verifying_key;    // base64 of the 32-byte Ed25519 public key
  Digest bound_measurement;
  std::string role_identity;
  std::string issued_at;        // RFC 3339 UTC
  friend bool operator==(const KeyRecord&, const KeyRecord&) = default;
};

void to_json(nlohmann::json& j, const KeyRecord& r);
void from_json(const nlohmann::json& j, KeyRecord& r);

/// keyid for raw verifying-key bytes.
std::string keyid_for(std::string_view verifying_key_bytes);

/// Read-only view of published verifying keys.
class KeyLookup {
 public:
  virtual ~KeyLookup() = default;
  virtual std::optional<KeyRecord> find(std::string_view keyid) const = 0;
};

/// Result of a successful verification.
struct VerifiedPayload {
  std::string payload;                      // decoded canonical bytes
  std::vector<std::string> verified_keyids;
};

/// Returns the payload iff at least one signature verifies over
/// pae_encode(payloadType, payload) against its registered key.
///
/// Throws Error(kFormat) for base64/UTF-8/JSON corruption or an empty
/// signature list, Error(kKeyUnknown) if no keyid is registered and
/// Error(kSignatureMismatch) if every registered signature fails.
VerifiedPayload verify(const Envelope& envelope, const KeyLookup& registry);

}  // namespace dbom

#endif  // DBOM_ENVELOPE_HPP_
