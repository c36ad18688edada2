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

#include "dbom/envelope.hpp"

#include <sodium.h>

#include "dbom/canonical.hpp"
#include "dbom/encoding.hpp"
#include "dbom/error.hpp"
#include "sodium_init.hpp"

namespace dbom {

using nlohmann::json;

namespace {

const std::string& member_string(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end() || !it->is_string()) {
    throw Error(ErrorCode::kFormat, std::string("envelope: missing or non-string member '") + name + "'");
  }
  return it->get_ref<const std::string&>();
}

}  // namespace

void to_json(json& j, const Envelope& e) {
  json sigs = json::array();
  for (const auto& s : e.signatures) sigs.push_back({{"keyid", s.keyid}, {"sig", s.sig}});
  j = {{"payloadType", e.payload_type}, {"payload", e.payload}, {"signatures", std::move(sigs)}};
}

Envelope envelope_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kFormat, "envelope: not a JSON object");
  Envelope e;
  e.payload_type = member_string(j, "payloadType");
  e.payload = member_string(j, "payload");
  auto it = j.find("signatures");
  if (it == j.end() || !it->is_array()) throw Error(ErrorCode::kFormat, "envelope: missing signatures array");
  for (const auto& s : *it) {
    if (!s.is_object()) throw Error(ErrorCode::kFormat, "envelope: signature entry is not an object");
    e.signatures.push_back({member_string(s, "keyid"), member_string(s, "sig")});
  }
  return e;
}

Envelope parse_envelope(std::string_view text) { return envelope_from_json(parse_json(text)); }

std::string serialize_envelope(const Envelope& e) { return canonicalize(json(e)); }

std::string pae_encode(std::string_view payload_type, std::string_view payload) {
  std::string out = "DSSEv1 ";
  out += std::to_string(payload_type.size());
  out += ' ';
  out += payload_type;
  out += ' ';
  out += std::to_string(payload.size());
  out += ' ';
  out += payload;
  return out;
}

void to_json(json& j, const KeyRecord& r) {
  j = {{"keyid", r.keyid},
       {"verifying_key", r.verifying_key},
       {"bound_measurement", r.bound_measurement},
       {"role_identity", r.role_identity},
       {"issued_at", r.issued_at}};
}

void from_json(const json& j, KeyRecord& r) {
  r.keyid = j.at("keyid").get<std::string>();
  r.verifying_key = j.at("verifying_key").get<std::string>();
  r.bound_measurement = j.at("bound_measurement").get<Digest>();
  r.role_identity = j.at("role_identity").get<std::string>();
  r.issued_at = j.at("issued_at").get<std::string>();
}

std::string keyid_for(std::string_view verifying_key_bytes) {
  return Digest::of(verifying_key_bytes).hex().substr(0, 16);
}

VerifiedPayload verify(const Envelope& envelope, const KeyLookup& registry) {
  internal::ensure_sodium();
  if (envelope.payload_type != kDbomPayloadType) {
    throw Error(ErrorCode::kFormat, "envelope: unexpected payloadType '" + envelope.payload_type + "'");
  }
  if (envelope.signatures.empty()) throw Error(ErrorCode::kFormat, "envelope: no signatures");
  auto payload = base64_decode(envelope.payload);
  if (!payload) throw Error(ErrorCode::kFormat, "envelope: payload is not valid base64");
  if (!is_valid_utf8(*payload)) throw Error(ErrorCode::kFormat, "envelope: payload is not valid UTF-8");

  const std::string message = pae_encode(envelope.payload_type, *payload);
  VerifiedPayload result;
  bool any_known = false;
  for (const auto& s : envelope.signatures) {
    auto record = registry.find(s.keyid);
    if (!record) continue;
    any_known = true;
    auto sig = base64_decode(s.sig);
    auto pk = base64_decode(record->verifying_key);
    if (!sig || sig->size() != crypto_sign_BYTES || !pk || pk->size() != crypto_sign_PUBLICKEYBYTES) continue;
    if (keyid_for(*pk) != s.keyid) continue;
    int rc = crypto_sign_verify_detached(reinterpret_cast<const unsigned char*>(sig->data()),
                                         reinterpret_cast<const unsigned char*>(message.data()), message.size(),
                                         reinterpret_cast<const unsigned char*>(pk->data()));
    if (rc == 0) result.verified_keyids.push_back(s.keyid);
  }
  if (!any_known) throw Error(ErrorCode::kKeyUnknown, "envelope: no signature keyid is registered");
  if (result.verified_keyids.empty()) throw Error(ErrorCode::kSignatureMismatch, "envelope: no signature verifies");
  result.payload = std::move(*payload);
  return result;
}

}  // namespace dbom
