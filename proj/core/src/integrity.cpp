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

#include "dbom/integrity.hpp"

#include "dbom/canonical.hpp"
#include "dbom/encoding.hpp"
#include "dbom/error.hpp"

namespace dbom {

using nlohmann::json;

void to_json(json& j, const IntegrityReport& r) {
  json failures = json::array();
  for (const auto& f : r.failures) failures.push_back({{"stage", f.stage}, {"message", f.message}});
  json violations = json::array();
  for (const auto& v : r.violations) violations.push_back({{"path", v.path}, {"message", v.message}});
  j = {{"pass", r.pass()},
       {"schema_valid", r.schema_valid},
       {"signature_valid", r.signature_valid},
       {"keyid_used", r.keyid_used ? json(*r.keyid_used) : json(nullptr)},
       {"kind", r.kind ? json(std::string(to_string(*r.kind))) : json(nullptr)},
       {"failures", std::move(failures)},
       {"violations", std::move(violations)}};
}

IntegrityReport integrity_check(std::string_view envelope_bytes, const KeyLookup& registry,
                                std::optional<BomKind> expected) {
  IntegrityReport report;
  Envelope envelope;
  try {
    envelope = parse_envelope(envelope_bytes);
  } catch (const std::exception& e) {
    report.failures.push_back({"parse", e.what()});
    return report;
  }

  // Schema stage works on the payload alone.
  std::optional<json> doc;
  if (auto payload = base64_decode(envelope.payload); !payload) {
    report.failures.push_back({"parse", "payload is not valid base64"});
  } else if (!is_valid_utf8(*payload)) {
    report.failures.push_back({"parse", "payload is not valid UTF-8"});
  } else {
    report.payload = *payload;
    try {
      doc = parse_json(*payload);
    } catch (const std::exception& e) {
      report.failures.push_back({"parse", e.what()});
    }
  }
  if (doc) {
    report.kind = expected ? expected : detect_bom_kind(*doc);
    if (!report.kind) {
      report.violations.push_back({"(root)", "not recognisable as a TBOM or IBOM"});
    } else {
      report.violations = validate_bom(*doc, *report.kind).violations;
    }
    report.schema_valid = report.violations.empty();
    if (!report.schema_valid) {
      std::string msg = std::to_string(report.violations.size()) + " violation(s); first at " +
                        report.violations.front().path + ": " + report.violations.front().message;
      report.failures.push_back({"schema", msg});
    }
  }

  try {
    auto verified = verify(envelope, registry);
    report.signature_valid = true;
    report.keyid_used = verified.verified_keyids.front();
  } catch (const Error& e) {
    switch (e.code()) {
      case ErrorCode::kKeyUnknown:
        report.failures.push_back({"key", e.what()});
        break;
      case ErrorCode::kSignatureMismatch:
        report.failures.push_back({"signature", e.what()});
        break;
      default:
        // Payload corruption already produced a parse failure above.
        if (doc) report.failures.push_back({"parse", e.what()});
        break;
    }
  }
  return report;
}

std::string_view to_string(ChainVerdict v) { return v == ChainVerdict::kPass ? "pass" : "link_mismatch"; }

ChainResult chain_check(const Ibom& ibom, const Tbom& tbom, const KeyRecord& tbom_signing_key) {
  Digest link;
  try {
    link = tbom_link_digest(tbom);
  } catch (const std::exception& e) {
    return {ChainVerdict::kLinkMismatch, std::string("tbom cannot be linked: ") + e.what()};
  }
  if (ibom.inference_identification.tbom_link != link) {
    return {ChainVerdict::kLinkMismatch, "ibom tbom_link " + ibom.inference_identification.tbom_link.hex() +
                                             " != tbom digest " + link.hex()};
  }
  if (tbom_signing_key.bound_measurement != tbom.measurement) {
    return {ChainVerdict::kLinkMismatch, "tbom signing key " + tbom_signing_key.keyid + " is bound to measurement " +
                                             tbom_signing_key.bound_measurement.hex() + ", tbom records " +
                                             tbom.measurement.hex()};
  }
  return {ChainVerdict::kPass, "tbom_link matches and signing key is bound to the tbom measurement"};
}

}  // namespace dbom
