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

#ifndef DBOM_BOM_HPP_
#define DBOM_BOM_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dbom/decimal.hpp"
#include "dbom/digest.hpp"
#include "dbom/metrics.hpp"

namespace dbom {

inline constexpr std::string_view kClassEdible = "edible";
inline constexpr std::string_view kClassPoisonous = "poisonous";

enum class BomKind { kTbom, kIbom };

std::string_view to_string(BomKind kind);

// ---------------------------------------------------------------------------
// Training BOM

struct ProjectMetadata {
  std::string name;
  std::string purpose;
  std::string version;
  std::string role_identity;
  friend bool operator==(const ProjectMetadata&, const ProjectMetadata&) = default;
};

struct DataSummary {
  std::string dataset_name;
  Digest dataset_digest;
  std::uint64_t total_samples = 0;
  std::map<std::string, std::uint64_t> class_distribution;
  std::vector<std::uint64_t> test_indices;
  std::vector<std::vector<std::uint64_t>> fold_indices;
  friend bool operator==(const DataSummary&, const DataSummary&) = default;
};

struct LayerSpec {
  std::string name;
  std::uint64_t input_dim = 0;
  std::uint64_t output_dim = 0;
  std::string activation;
  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct ModelArchitecture {
  std::string kind;
  std::vector<LayerSpec> layers;
  std::vector<std::string> concept_names;
  friend bool operator==(const ModelArchitecture&, const ModelArchitecture&) = default;
};

struct HyperparameterRecord {
  Decimal learning_rate;
  std::uint64_t epochs = 0;
  Decimal l2_lambda;
  std::uint64_t seed = 0;
  std::string optimizer;
  friend bool operator==(const HyperparameterRecord&, const HyperparameterRecord&) = default;
};

struct TrainingMethodology {
  Decimal split_fraction_test;
  std::uint64_t cv_folds = 0;
  HyperparameterRecord hyperparameters;
  std::string final_model_trained_on;
  friend bool operator==(const TrainingMethodology&, const TrainingMethodology&) = default;
};

struct CrossValidationMetrics {
  Decimal mean_accuracy;
  Decimal std_accuracy;
  std::vector<Decimal> per_fold_accuracy;
  friend bool operator==(const CrossValidationMetrics&, const CrossValidationMetrics&) = default;
};

struct PerformanceMetrics {
  CrossValidationMetrics cv;
  Metrics final_test;
  friend bool operator==(const PerformanceMetrics&, const PerformanceMetrics&) = default;
};

struct EnvironmentRecord {
  std::string os;
  std::string cpu;
  std::string toolkit_version;
  std::map<std::string, std::string> component_versions;
  friend bool operator==(const EnvironmentRecord&, const EnvironmentRecord&) = default;
};

struct OutputArtifacts {
  std::string model_path;
  Digest model_digest;
  std::string tbom_path;
  friend bool operator==(const OutputArtifacts&, const OutputArtifacts&) = default;
};

struct Tbom {
  ProjectMetadata project_metadata;
  DataSummary data_summary;
  ModelArchitecture model_architecture;
  TrainingMethodology training_methodology;
  PerformanceMetrics performance_metrics;
  EnvironmentRecord environment;
  OutputArtifacts output_artifacts;
  Digest measurement;
  friend bool operator==(const Tbom&, const Tbom&) = default;
};

/// Raw per-section content handed over by the training pipeline. Any section
/// left empty makes build_tbom fail with an error naming it.
struct TrainingOutput {
  std::optional<ProjectMetadata> project_metadata;
  std::optional<DataSummary> data_summary;
  std::optional<ModelArchitecture> model_architecture;
  std::optional<TrainingMethodology> training_methodology;
  std::optional<PerformanceMetrics> performance_metrics;
  std::optional<EnvironmentRecord> environment;
  std::optional<OutputArtifacts> output_artifacts;
  std::optional<Digest> measurement;
};

/// Assembles a Tbom; throws Error(kConstruction) whose message is the name of
/// the first absent section (an environment without component versions
/// counts as absent).
Tbom build_tbom(const TrainingOutput& output);

/// digest(canonicalize(tbom)). Validates first; throws Error(kValidation).
Digest tbom_link_digest(const Tbom& tbom);

// ---------------------------------------------------------------------------
// Decision rule shared by the predictor, the IBOM builder and the validator

enum class Certainty { kLow, kMedium, kHigh };

std::string_view to_string(Certainty c);
std::optional<Certainty> certainty_from_string(std::string_view text);

inline constexpr Decimal kHighCertaintyDistance = Decimal::from_units(400'000'000);    // 0.4
inline constexpr Decimal kMediumCertaintyDistance = Decimal::from_units(150'000'000);  // 0.15

/// Everything derivable from p(poisonous) and the threshold alone.
struct DecisionOutcome {
  std::string decision;  // "poisonous" iff p >= threshold (ties are unsafe)
  Decimal distance_from_threshold;
  Certainty certainty = Certainty::kLow;
  Decimal confidence;  // probability of the decided class
  Decimal probability_edible;
};

DecisionOutcome decide(Decimal probability_poisonous, Decimal threshold);

/// Output of the predictor as recorded in an IBOM.
struct Prediction {
  Decimal logit;
  Decimal probability_poisonous;
  Decimal threshold;
  std::string decision;
  Decimal distance;
  Certainty certainty = Certainty::kLow;
  friend bool operator==(const Prediction&, const Prediction&) = default;
};

// ---------------------------------------------------------------------------
// Inference BOM

struct InferenceIdentification {
  std::string inference_id;
  std::string timestamp;
  Digest tbom_link;
  friend bool operator==(const InferenceIdentification&, const InferenceIdentification&) = default;
};

struct InputMetadata {
  std::string input_id;
  std::map<std::string, std::string> raw_features;
  std::uint64_t encoded_dimensions = 0;
  std::string preprocessing;
  friend bool operator==(const InputMetadata&, const InputMetadata&) = default;
};

struct ConceptContribution {
  std::string concept_name;
  Decimal contribution;
  friend bool operator==(const ConceptContribution&, const ConceptContribution&) = default;
};

struct FeatureAnalysis {
  std::vector<ConceptContribution> concept_contributions;
  // Recorded next to the contributions so that sum + bias = logit can be
  // re-checked from the IBOM alone.
  Decimal bias;
  friend bool operator==(const FeatureAnalysis&, const FeatureAnalysis&) = default;
};

struct PathwayStep {
  std::string step;
  Digest input_digest;
  Digest output_digest;
  friend bool operator==(const PathwayStep&, const PathwayStep&) = default;
};

struct RuntimeEnvironment {
  std::string os;
  std::string cpu;
  std::string toolkit_version;
  std::string serving_system;
  friend bool operator==(const RuntimeEnvironment&, const RuntimeEnvironment&) = default;
};

struct Ibom {
  InferenceIdentification inference_identification;
  InputMetadata input_metadata;
  Prediction prediction;
  FeatureAnalysis feature_analysis;
  std::vector<PathwayStep> decision_pathway;
  std::uint64_t duration_micros = 0;
  RuntimeEnvironment runtime_environment;
  friend bool operator==(const Ibom&, const Ibom&) = default;
};

inline constexpr std::size_t kMinimumPathwaySteps = 4;

/// Builds an IBOM with a fresh UUIDv4 inference id and a millisecond RFC 3339
/// UTC timestamp. Decision fields are recomputed from the prediction's
/// probability and threshold. Throws Error(kConstruction) for a pathway with
/// fewer than four steps.
Ibom build_ibom(const Prediction& prediction, const FeatureAnalysis& analysis, InputMetadata input_meta,
                std::vector<PathwayStep> pathway, std::uint64_t duration_micros, RuntimeEnvironment env,
                const Digest& tbom_link);

/// "2026-10-16T03:41:07.512Z"
std::string utc_timestamp_now();
/// Random RFC 4122 version 4 UUID, lowercase.
std::string make_uuid_v4();

bool is_rfc3339_utc_millis(std::string_view text);
bool is_uuid(std::string_view text);

// JSON mapping. from_json throws on structural problems; run validate_bom
// first to get a full violation list.
void to_json(nlohmann::json& j, const Tbom& t);
void from_json(const nlohmann::json& j, Tbom& t);
void to_json(nlohmann::json& j, const Ibom& i);
void from_json(const nlohmann::json& j, Ibom& i);

}  // namespace dbom

#endif  // DBOM_BOM_HPP_
