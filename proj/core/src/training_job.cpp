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

#include "dbom/training_job.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "dbom/canonical.hpp"
#include "dbom/dataset.hpp"
#include "dbom/environment.hpp"
#include "dbom/error.hpp"
#include "dbom/metrics.hpp"
#include "dbom/split.hpp"
#include "dbom/validate.hpp"

namespace dbom {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

template <typename F>
auto stage(std::string_view name, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), std::string(name) + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kStage, std::string(name) + ": " + e.what());
  }
}

Decimal config_decimal(const json& j, const char* name, Decimal fallback) {
  auto it = j.find(name);
  if (it == j.end()) return fallback;
  std::optional<Decimal> d;
  if (it->is_string()) {
    d = Decimal::parse_lenient(it->get_ref<const std::string&>());
  } else if (it->is_number_integer()) {
    d = Decimal::from_integer(it->get<std::int64_t>());
  } else if (it->is_number_float()) {
    d = Decimal::from_double(it->get<double>());
  }
  if (!d) throw Error(ErrorCode::kConfig, std::string("'") + name + "' must be a decimal number");
  return *d;
}

std::uint64_t config_uint(const json& j, const char* name, std::uint64_t fallback) {
  auto it = j.find(name);
  if (it == j.end()) return fallback;
  if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<std::int64_t>() >= 0)) {
    throw Error(ErrorCode::kConfig, std::string("'") + name + "' must be a non-negative integer");
  }
  return it->get<std::uint64_t>();
}

std::string config_text(const json& j, const char* name, std::string fallback) {
  auto it = j.find(name);
  if (it == j.end()) return fallback;
  if (!it->is_string()) throw Error(ErrorCode::kConfig, std::string("'") + name + "' must be text");
  return it->get<std::string>();
}

std::string read_all(const fs::path& path, ErrorCode code) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(code, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_all(const fs::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kStorage, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out.flush()) throw Error(ErrorCode::kStorage, "cannot write " + path.string());
}

Decimal accuracy_on(const ModelArtifact& model, const Matrix& x, std::span<const std::uint8_t> y) {
  auto probs = predict_probabilities(model, x);
  return compute_metrics(probs, y, model.threshold).accuracy;
}

std::vector<std::uint8_t> select_labels(std::span<const std::uint8_t> y, std::span<const std::uint64_t> idx) {
  std::vector<std::uint8_t> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(y[i]);
  return out;
}

}  // namespace

TrainingConfig parse_training_config(std::string_view bytes, const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kConfig, "config must be a JSON object");

  TrainingConfig c;
  auto ds = config_text(j, "dataset_path", "");
  if (ds.empty()) throw Error(ErrorCode::kConfig, "'dataset_path' is required");
  c.dataset_path = fs::path(ds).is_absolute() ? fs::path(ds) : base_dir / ds;
  c.dataset_name = config_text(j, "dataset_name", c.dataset_path.stem().string());
  auto out = config_text(j, "output_dir", "");
  if (out.empty()) throw Error(ErrorCode::kConfig, "'output_dir' is required");
  c.output_dir = fs::path(out).is_absolute() ? fs::path(out) : base_dir / out;
  c.pipeline_id = config_text(j, "pipeline_id", std::string(kDefaultTrainingPipelineId));

  json hp = j.value("hyperparameters", json::object());
  if (!hp.is_object()) throw Error(ErrorCode::kConfig, "'hyperparameters' must be an object");
  Hyperparameters defaults;
  c.hyperparameters.learning_rate = config_decimal(hp, "learning_rate", defaults.learning_rate);
  c.hyperparameters.epochs = config_uint(hp, "epochs", defaults.epochs);
  c.hyperparameters.l2_lambda = config_decimal(hp, "l2_lambda", defaults.l2_lambda);
  c.hyperparameters.threshold = config_decimal(hp, "threshold", defaults.threshold);
  c.hyperparameters.seed = config_uint(j, "seed", defaults.seed);
  if (c.hyperparameters.learning_rate <= Decimal()) throw Error(ErrorCode::kConfig, "learning_rate must be positive");
  if (c.hyperparameters.l2_lambda < Decimal()) throw Error(ErrorCode::kConfig, "l2_lambda must not be negative");
  if (c.hyperparameters.threshold <= Decimal() || c.hyperparameters.threshold >= Decimal::from_integer(1)) {
    throw Error(ErrorCode::kConfig, "threshold must lie in (0,1)");
  }
  c.test_fraction = config_decimal(j, "test_fraction", c.test_fraction);
  c.cv_folds = config_uint(j, "cv_folds", c.cv_folds);

  json project = j.value("project", json::object());
  if (!project.is_object()) throw Error(ErrorCode::kConfig, "'project' must be an object");
  c.project.name = config_text(project, "name", "mushroom-classifier");
  c.project.purpose = config_text(project, "purpose", "edible/poisonous mushroom classification");
  c.project.version = config_text(project, "version", "1.0.0");
  c.project.role_identity = config_text(j, "role_identity", "model-provider");
  return c;
}

Decimal population_std(std::span<const Decimal> values, Decimal mean) {
  if (values.empty()) return Decimal();
  long double acc = 0;
  for (auto v : values) {
    long double d = static_cast<long double>((v - mean).units()) / Decimal::kScale;
    acc += d * d;
  }
  return Decimal::from_double(static_cast<double>(std::sqrt(acc / values.size())));
}

TrainingResult train_and_build(const TrainingConfig& config, const Digest& measurement) {
  Dataset dataset = stage("load", [&] { return load_csv_dataset(config.dataset_path); });
  dataset.name = config.dataset_name;
  EncodedDataset enc = stage("encode", [&] { return one_hot_encode(dataset); });
  const auto& hp = config.hyperparameters;

  HoldoutSplit split = stage("split", [&] { return stratified_holdout_split(enc.y, config.test_fraction, hp.seed); });
  auto folds = stage("split", [&] { return stratified_kfold(split.train, enc.y, config.cv_folds, hp.seed); });

  std::vector<Decimal> fold_acc = stage("cross-validation", [&] {
    std::vector<Decimal> acc;
    for (const auto& fold : folds) {
      auto fit_idx = complement_of_fold(split.train, fold);
      auto model = train_logistic(enc.x.select_rows(fit_idx), select_labels(enc.y, fit_idx), hp, enc.encoding);
      acc.push_back(accuracy_on(model, enc.x.select_rows(fold), select_labels(enc.y, fold)));
    }
    return acc;
  });

  TrainingResult result;
  result.model = stage("train", [&] {
    return train_logistic(enc.x.select_rows(split.train), select_labels(enc.y, split.train), hp, enc.encoding);
  });
  Metrics final_test = stage("evaluate", [&] {
    auto probs = predict_probabilities(result.model, enc.x.select_rows(split.test));
    return compute_metrics(probs, select_labels(enc.y, split.test), result.model.threshold);
  });
  result.model_bytes = canonicalize(json(result.model));

  TrainingOutput out;
  out.project_metadata = config.project;

  DataSummary ds;
  ds.dataset_name = dataset.name;
  ds.dataset_digest = dataset.source_digest;
  ds.total_samples = dataset.size();
  ds.class_distribution[std::string(kClassEdible)] = dataset.count(kLabelEdible);
  ds.class_distribution[std::string(kClassPoisonous)] = dataset.count(kLabelPoisonous);
  ds.test_indices = split.test;
  ds.fold_indices = folds;
  out.data_summary = std::move(ds);

  ModelArchitecture arch;
  arch.kind = std::string(kArchitectureTag);
  arch.layers.push_back({"concept-head", enc.encoding.size(), 1, "sigmoid"});
  arch.concept_names = enc.encoding.concept_names();
  out.model_architecture = std::move(arch);

  TrainingMethodology tm;
  tm.split_fraction_test = config.test_fraction;
  tm.cv_folds = config.cv_folds;
  tm.hyperparameters = {hp.learning_rate, hp.epochs, hp.l2_lambda, hp.seed, std::string(kOptimizer)};
  tm.final_model_trained_on = "all non-test samples";
  out.training_methodology = std::move(tm);

  PerformanceMetrics pm;
  pm.cv.per_fold_accuracy = fold_acc;
  pm.cv.mean_accuracy = exact_mean(fold_acc);
  pm.cv.std_accuracy = population_std(fold_acc, pm.cv.mean_accuracy);
  pm.final_test = final_test;
  out.performance_metrics = std::move(pm);

  out.environment = capture_environment();
  out.output_artifacts = OutputArtifacts{std::string(kModelFileName), Digest::of(result.model_bytes),
                                         std::string(kTbomFileName)};
  out.measurement = measurement;

  result.tbom = stage("build-tbom", [&] { return build_tbom(out); });
  result.model_path = config.output_dir / kModelFileName;
  result.tbom_path = config.output_dir / kTbomFileName;
  return result;
}

TrainingResult run_training_job(const fs::path& config_path, KeyAuthority& authority) {
  const std::string config_bytes = stage("config", [&] { return read_all(config_path, ErrorCode::kConfig); });
  TrainingConfig config = stage("config", [&] {
    return parse_training_config(config_bytes, config_path.has_parent_path() ? config_path.parent_path() : ".");
  });
  const Digest measurement = measure_pipeline(config_bytes, config.pipeline_id);
  const auto issued = stage("key-issuance", [&] {
    return authority.issue_signing_key(measurement, config.project.role_identity);
  });
  const KeyHandle& handle = issued.first;

  TrainingResult result = train_and_build(config, measurement);
  result.key = issued.second;
  const std::string payload = stage("sign", [&] {
    auto report = validate_bom(json(result.tbom), BomKind::kTbom);
    if (!report.valid()) throw Error(ErrorCode::kValidation, report.summary());
    return canonicalize(json(result.tbom));
  });
  result.envelope = stage("sign", [&] { return authority.sign(payload, handle); });

  stage("write", [&] {
    std::error_code ec;
    fs::create_directories(config.output_dir, ec);
    if (ec) throw Error(ErrorCode::kStorage, "cannot create " + config.output_dir.string() + ": " + ec.message());
    write_all(result.model_path, result.model_bytes);
    write_all(result.tbom_path, serialize_envelope(result.envelope));
  });
  return result;
}

}  // namespace dbom
