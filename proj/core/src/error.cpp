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

#include "dbom/error.hpp"

namespace dbom {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kCanonicalization: return "canonicalization";
    case ErrorCode::kConstruction: return "construction";
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kFormat: return "format";
    case ErrorCode::kKeyUnknown: return "key-unknown";
    case ErrorCode::kSignatureMismatch: return "signature-mismatch";
    case ErrorCode::kAttestationRefused: return "attestation-refused";
    case ErrorCode::kNotFound: return "not-found";
    case ErrorCode::kLoad: return "load";
    case ErrorCode::kSplit: return "split";
    case ErrorCode::kDivergence: return "divergence";
    case ErrorCode::kMetrics: return "metrics";
    case ErrorCode::kModelTampered: return "model-tampered";
    case ErrorCode::kOutOfVocabulary: return "out-of-vocabulary";
    case ErrorCode::kMissingAttribute: return "missing-attribute";
    case ErrorCode::kUnknownConcept: return "unknown-concept";
    case ErrorCode::kRuleSyntax: return "rule-syntax";
    case ErrorCode::kStorage: return "storage";
    case ErrorCode::kStage: return "stage";
    case ErrorCode::kConfig: return "config";
  }
  return "unknown";
}

}  // namespace dbom
