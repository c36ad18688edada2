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

#ifndef DBOM_TRAINING_JOB_HPP_
#define DBOM_TRAINING_JOB_HPP_

#include <filesystem>
#include <string>
#include <string_view>

#include "dbom/bom.hpp"
#include "dbom/envelope.hpp"
#include "dbom/key_authority.hpp"
#include "dbom/logistic.hpp"

namespace dbom {

inline constexpr std::string_view kDefaultTrainingPipelineId = "dbom-training";
inline constexpr std::string_view kModelFileName = "model.json";
inline constexpr std::string_view kTbomFileName = "tbom.dbom.json";

struct TrainingConfig {
  std::filesystem::path dataset_path;  // resolved against the config's directory
  std::string dataset_name;
  Hyperparameters hyperparameters;
  Decimal test_fraction = Decimal::from_units(200'000'000);  // 0.2
  std::uint64_t cv_folds = 5;
  std::filesystem::path output_dir;
  std::string pipeline_id{kDefaultTrainingPipelineId};
  ProjectMetadata project;
};

/// Parses the JSON config. Decimal fields accept decimal text or JSON numbers.
/// Relative paths resolve against `base_dir`. Throws Error(kConfig).
TrainingConfig parse_training_config(std::string_view bytes, const std::filesystem::path& base_dir);

/// Everything a run produces. The TBOM carries no wall-clock data, so equal
/// configs give byte-identical payloads.
struct TrainingResult {
  ModelArtifact model;
  std::string model_bytes;  // canonical artifact as written
  Tbom tbom;
  Envelope envelope;
  KeyRecord key;
  std::filesystem::path model_path;
  std::filesystem::path tbom_path;
};

/// Pure part of a run: load, encode, split, cross-validate, fit, evaluate and
/// assemble the TBOM. Nothing is signed or written.
TrainingResult train_and_build(const TrainingConfig& config, const Digest& measurement);

/// Full job: measure the config, obtain a key (before any work, so a refusal
/// leaves nothing behind), train, write model.json and the signed
/// tbom.dbom.json into the output directory.
///
/// Errors keep their code; the message is prefixed with the failing stage.
TrainingResult run_training_job(const std::filesystem::path& config_path, KeyAuthority& authority);

/// Population standard deviation of `values`, rounded to nine decimals.
Decimal population_std(std::span<const Decimal> values, Decimal mean);

}  // namespace dbom

#endif  // DBOM_TRAINING_JOB_HPP_
