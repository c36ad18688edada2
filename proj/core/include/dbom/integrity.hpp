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

#ifndef DBOM_INTEGRITY_HPP_
#define DBOM_INTEGRITY_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dbom/bom.hpp"
#include "dbom/envelope.hpp"
#include "dbom/validate.hpp"

namespace dbom {

struct StageFailure {
  std::string stage;  // parse, schema, key, signature
  std::string message;
  friend bool operator==(const StageFailure&, const StageFailure&) = default;
};

struct IntegrityReport {
  bool schema_valid = false;
  bool signature_valid = false;
  std::optional<std::string> keyid_used;
  std::optional<BomKind> kind;
  std::vector<StageFailure> failures;  // in stage order; front() is the first failing stage
  std::vector<Violation> violations;
  std::string payload;  // decoded payload when it could be decoded

  bool pass() const { return schema_valid && signature_valid; }
};

void to_json(nlohmann::json& j, const IntegrityReport& r);

/// parse -> schema -> key -> signature. Schema and signature are judged
/// independently, so a well-signed but incomplete BOM reports
/// signature_valid = true, schema_valid = false. Never throws for bad input.
IntegrityReport integrity_check(std::string_view envelope_bytes, const KeyLookup& registry,
                                std::optional<BomKind> expected = std::nullopt);

enum class ChainVerdict { kPass, kLinkMismatch };

struct ChainResult {
  ChainVerdict verdict = ChainVerdict::kLinkMismatch;
  std::string reason;
  bool pass() const { return verdict == ChainVerdict::kPass; }
};

std::string_view to_string(ChainVerdict v);

/// Pass iff the IBOM's tbom_link equals tbom_link_digest(tbom) and the key
/// that signed the TBOM is bound to the TBOM's measurement.
ChainResult chain_check(const Ibom& ibom, const Tbom& tbom, const KeyRecord& tbom_signing_key);

}  // namespace dbom

#endif  // DBOM_INTEGRITY_HPP_
