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

#include "dbom/inference.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

#include "dbom/canonical.hpp"
#include "dbom/encoding.hpp"
#include "dbom/environment.hpp"
#include "dbom/error.hpp"

namespace dbom {

using nlohmann::json;

namespace {

json prediction_json(const Prediction& p) {
  return {{"logit", p.logit.to_string()},
          {"probability_poisonous", p.probability_poisonous.to_string()},
          {"threshold", p.threshold.to_string()},
          {"decision", p.decision},
          {"distance", p.distance.to_string()},
          {"certainty", std::string(to_string(p.certainty))}};
}

json analysis_json(const FeatureAnalysis& a) {
  json list = json::array();
  for (const auto& c : a.concept_contributions) {
    list.push_back({{"concept", c.concept_name}, {"contribution", c.contribution.to_string()}});
  }
  return {{"concept_contributions", std::move(list)}, {"bias", a.bias.to_string()}};
}

}  // namespace

FeatureMap parse_feature_map(std::string_view bytes) {
  json j = parse_json(bytes);
  if (!j.is_object()) throw Error(ErrorCode::kFormat, "input must be a JSON object of attribute -> value");
  FeatureMap out;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_string()) throw Error(ErrorCode::kFormat, "input attribute '" + k + "' must map to text");
    out[k] = v.get<std::string>();
  }
  return out;
}

ModelArtifact parse_model_artifact(std::string_view bytes) { return parse_json(bytes).get<ModelArtifact>(); }

ModelArtifact verify_model_against_tbom(std::string_view artifact_bytes, const Tbom& tbom) {
  json doc = parse_json(artifact_bytes);
  std::string canonical;
  try {
    canonical = canonicalize(doc);
  } catch (const Error& e) {
    throw Error(ErrorCode::kFormat, std::string("model artifact: ") + e.what());
  }
  const Digest actual = Digest::of(canonical);
  if (actual != tbom.output_artifacts.model_digest) {
    throw Error(ErrorCode::kModelTampered, "model digest " + actual.hex() + " does not match TBOM model_digest " +
                                               tbom.output_artifacts.model_digest.hex());
  }
  return doc.get<ModelArtifact>();
}

Digest inference_measurement(const Digest& model_digest, const Digest& tbom_link, std::string_view pipeline_id) {
  json config = {{"model_digest", model_digest.hex()}, {"tbom_link", tbom_link.hex()}};
  return measure_pipeline(canonicalize(config), pipeline_id);
}

std::vector<std::uint8_t> encode_features(const ModelArtifact& model, const FeatureMap& raw) {
  const auto attributes = model.encoding.attributes();
  for (const auto& [attr, value] : raw) {
    if (!std::binary_search(attributes.begin(), attributes.end(), attr)) {
      throw Error(ErrorCode::kOutOfVocabulary, "unknown attribute '" + attr + "'");
    }
  }
  std::vector<std::uint8_t> x(model.encoding.size(), 0);
  for (const auto& attr : attributes) {
    auto it = raw.find(attr);
    if (it == raw.end()) throw Error(ErrorCode::kMissingAttribute, "missing attribute '" + attr + "'");
    auto pos = model.encoding.find(attr, it->second);
    if (!pos) throw Error(ErrorCode::kOutOfVocabulary, "out-of-vocabulary value " + attr + "=" + it->second);
    x[*pos] = 1;
  }
  return x;
}

Prediction predict_encoded(const ModelArtifact& model, std::span<const std::uint8_t> encoded) {
  Prediction p;
  p.logit = model_logit(model, encoded);
  p.probability_poisonous = sigmoid(p.logit);
  p.threshold = model.threshold;
  auto outcome = decide(p.probability_poisonous, p.threshold);
  p.decision = outcome.decision;
  p.distance = outcome.distance_from_threshold;
  p.certainty = outcome.certainty;
  return p;
}

PredictResult predict(const ModelArtifact& model, const FeatureMap& raw) {
  PredictResult r;
  r.encoded = encode_features(model, raw);
  r.prediction = predict_encoded(model, r.encoded);
  return r;
}

FeatureAnalysis concept_contributions(const ModelArtifact& model, std::span<const std::uint8_t> encoded) {
  if (encoded.size() != model.weights.size()) {
    throw Error(ErrorCode::kFormat, "encoded vector has " + std::to_string(encoded.size()) + " entries, model has " +
                                        std::to_string(model.weights.size()) + " weights");
  }
  FeatureAnalysis a;
  a.bias = model.bias;
  const auto& features = model.encoding.features();
  a.concept_contributions.reserve(features.size());
  for (std::size_t j = 0; j < features.size(); ++j) {
    a.concept_contributions.push_back({features[j].concept_name(), encoded[j] ? model.weights[j] : Decimal()});
  }
  std::stable_sort(a.concept_contributions.begin(), a.concept_contributions.end(),
                   [](const ConceptContribution& l, const ConceptContribution& r) {
                     if (l.contribution.abs() != r.contribution.abs()) return l.contribution.abs() > r.contribution.abs();
                     return l.concept_name < r.concept_name;
                   });
  return a;
}

void to_json(json& j, const WhatIfResult& r) {
  j = {{"unsigned", true},
       {"prediction", prediction_json(r.prediction)},
       {"feature_analysis", analysis_json(r.analysis)}};
}

WhatIfResult what_if(const ModelArtifact& model, const FeatureMap& raw, const std::map<std::string, int>& overrides) {
  WhatIfResult r;
  r.encoded = encode_features(model, raw);
  for (const auto& [concept_name, value] : overrides) {
    auto pos = model.encoding.find_concept(concept_name);
    if (!pos) throw Error(ErrorCode::kUnknownConcept, "unknown concept '" + concept_name + "'");
    if (value != 0 && value != 1) throw Error(ErrorCode::kFormat, "override for '" + concept_name + "' must be 0 or 1");
    r.encoded[*pos] = static_cast<std::uint8_t>(value);
  }
  r.prediction = predict_encoded(model, r.encoded);
  r.analysis = concept_contributions(model, r.encoded);
  return r;
}

// ---------------------------------------------------------------------------

InferenceEngine::InferenceEngine(std::string artifact_bytes, Tbom tbom, std::string serving_system)
    : artifact_bytes_(std::move(artifact_bytes)), tbom_(std::move(tbom)), serving_system_(std::move(serving_system)) {
  tbom_link_ = tbom_link_digest(tbom_);
  model_ = verify_model_against_tbom(artifact_bytes_, tbom_);
  model_digest_ = tbom_.output_artifacts.model_digest;
}

Digest InferenceEngine::measurement(std::string_view pipeline_id) const {
  return inference_measurement(model_digest_, tbom_link_, pipeline_id);
}

InferenceOutput InferenceEngine::run(std::string_view raw_input_bytes, const KeyAuthority& authority,
                                     const KeyHandle& handle) const {
  const auto start = std::chrono::steady_clock::now();
  std::vector<PathwayStep> pathway;

  FeatureMap raw = parse_feature_map(raw_input_bytes);
  const Digest features_digest = canonical_digest(json(raw));
  pathway.push_back({"decode-input", Digest::of(raw_input_bytes), features_digest});

  // Re-hash the bytes being served so the pathway attests this very request.
  const Digest served = Digest::of(canonicalize(parse_json(artifact_bytes_)));
  if (served != model_digest_) throw Error(ErrorCode::kModelTampered, "served model no longer matches its TBOM");
  pathway.push_back({"verify-model", Digest::of(artifact_bytes_), served});

  auto encoded = encode_features(model_, raw);
  const Digest encoded_digest = canonical_digest(json(encoded));
  pathway.push_back({"encode", features_digest, encoded_digest});

  Prediction prediction = predict_encoded(model_, encoded);
  FeatureAnalysis analysis = concept_contributions(model_, encoded);
  pathway.push_back({"predict", encoded_digest, canonical_digest(prediction_json(prediction))});

  InputMetadata meta;
  meta.input_id = features_digest.hex();
  meta.raw_features = raw;
  meta.encoded_dimensions = encoded.size();
  meta.preprocessing = std::string(kPreprocessing);

  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - start);
  InferenceOutput out;
  out.ibom = build_ibom(prediction, analysis, std::move(meta), std::move(pathway),
                        static_cast<std::uint64_t>(micros.count()), capture_runtime_environment(serving_system_),
                        tbom_link_);
  out.payload = canonicalize(json(out.ibom));
  out.envelope = authority.sign(out.payload, handle);
  return out;
}

InferenceOutput run_inference_job(std::string_view raw_input_bytes, std::string_view artifact_bytes, const Tbom& tbom,
                                  const KeyAuthority& authority, const KeyHandle& handle) {
  InferenceEngine engine(std::string(artifact_bytes), tbom);
  return engine.run(raw_input_bytes, authority, handle);
}

std::string decision_summary(const Ibom& ibom, std::size_t top_n) {
  const auto outcome = decide(ibom.prediction.probability_poisonous, ibom.prediction.threshold);
  std::ostringstream s;
  s << "inference " << ibom.inference_identification.inference_id << " at "
    << ibom.inference_identification.timestamp << "\n";
  s << "decision: " << ibom.prediction.decision << " (confidence " << outcome.confidence.to_string()
    << ", certainty " << to_string(ibom.prediction.certainty) << ")\n";
  s << "p(poisonous) " << ibom.prediction.probability_poisonous.to_string() << ", threshold "
    << ibom.prediction.threshold.to_string() << ", distance " << ibom.prediction.distance.to_string() << "\n";
  s << "tbom link: " << ibom.inference_identification.tbom_link.hex() << "\n";
  s << "top concepts:\n";
  std::size_t shown = 0;
  for (const auto& c : ibom.feature_analysis.concept_contributions) {
    if (shown == top_n || c.contribution == Decimal()) break;
    s << "  " << c.concept_name << " " << c.contribution.to_string() << "\n";
    ++shown;
  }
  return s.str();
}

}  // namespace dbom
