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

#ifndef DBOM_INFERENCE_HPP_
#define DBOM_INFERENCE_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dbom/bom.hpp"
#include "dbom/envelope.hpp"
#include "dbom/key_authority.hpp"
#include "dbom/logistic.hpp"

namespace dbom {

inline constexpr std::string_view kDefaultInferencePipelineId = "dbom-inference";
inline constexpr std::string_view kPreprocessing = "one-hot attribute=value concepts, strict vocabulary";

using FeatureMap = std::map<std::string, std::string>;

/// Parses a JSON object of attribute -> value text. Throws Error(kFormat).
FeatureMap parse_feature_map(std::string_view bytes);

ModelArtifact parse_model_artifact(std::string_view bytes);

/// Returns the artifact iff digest(canonical form of `artifact_bytes`) equals
/// the TBOM's pinned model digest. Throws Error(kModelTampered) on mismatch and
/// Error(kFormat) if the bytes do not parse.
ModelArtifact verify_model_against_tbom(std::string_view artifact_bytes, const Tbom& tbom);

/// Measurement an inference pipeline presents for its signing key: bound to
/// the exact model and TBOM it serves.
Digest inference_measurement(const Digest& model_digest, const Digest& tbom_link, std::string_view pipeline_id);

/// 0/1 vector in encoding order. Throws Error(kMissingAttribute) for an absent
/// attribute and Error(kOutOfVocabulary) for an unseen attribute or value.
std::vector<std::uint8_t> encode_features(const ModelArtifact& model, const FeatureMap& raw);

Prediction predict_encoded(const ModelArtifact& model, std::span<const std::uint8_t> encoded);

struct PredictResult {
  Prediction prediction;
  std::vector<std::uint8_t> encoded;
};

PredictResult predict(const ModelArtifact& model, const FeatureMap& raw);

/// contribution_j = w_j * x_j for every feature, sorted by |contribution|
/// descending then concept name. `bias` is copied so that the sum identity can
/// be rechecked from the result alone.
FeatureAnalysis concept_contributions(const ModelArtifact& model, std::span<const std::uint8_t> encoded);

struct WhatIfResult {
  Prediction prediction;
  FeatureAnalysis analysis;
  std::vector<std::uint8_t> encoded;
};

void to_json(nlohmann::json& j, const WhatIfResult& r);

/// Applies concept -> {0,1} overrides to the encoded input and re-predicts.
/// The result is hypothetical and is never signed. Throws
/// Error(kUnknownConcept) for a concept outside the encoding.
WhatIfResult what_if(const ModelArtifact& model, const FeatureMap& raw, const std::map<std::string, int>& overrides);

struct InferenceOutput {
  Ibom ibom;
  std::string payload;  // canonical IBOM bytes
  Envelope envelope;
};

/// A verified model bound to its TBOM, ready to serve.
class InferenceEngine {
 public:
  /// Verifies `artifact_bytes` against `tbom` (Error(kModelTampered)).
  InferenceEngine(std::string artifact_bytes, Tbom tbom, std::string serving_system = "dbom-cli");

  const ModelArtifact& model() const { return model_; }
  const Tbom& tbom() const { return tbom_; }
  const Digest& tbom_link() const { return tbom_link_; }
  const Digest& model_digest() const { return model_digest_; }
  Digest measurement(std::string_view pipeline_id = kDefaultInferencePipelineId) const;

  /// decode-input -> verify-model -> encode -> predict, then build and sign
  /// the IBOM with `handle`.
  InferenceOutput run(std::string_view raw_input_bytes, const KeyAuthority& authority, const KeyHandle& handle) const;

 private:
  std::string artifact_bytes_;
  Tbom tbom_;
  ModelArtifact model_;
  Digest model_digest_;
  Digest tbom_link_;
  std::string serving_system_;
};

/// Verifies the model, then runs one inference. No IBOM is produced if the
/// model fails verification.
InferenceOutput run_inference_job(std::string_view raw_input_bytes, std::string_view artifact_bytes, const Tbom& tbom,
                                  const KeyAuthority& authority, const KeyHandle& handle);

/// Plain-text decision summary written next to an IBOM envelope.
std::string decision_summary(const Ibom& ibom, std::size_t top_n = 5);

}  // namespace dbom

#endif  // DBOM_INFERENCE_HPP_
