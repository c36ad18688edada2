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

#include "dbom/bom.hpp"

#include <sodium.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>

#include "dbom/canonical.hpp"
#include "dbom/error.hpp"
#include "dbom/validate.hpp"
#include "sodium_init.hpp"

namespace dbom {

namespace {

using json = nlohmann::json;

Decimal decimal_field(const json& j, const char* key) {
  auto d = Decimal::parse(j.at(key).get<std::string>());
  if (!d) throw Error(ErrorCode::kFormat, std::string("malformed decimal field ") + key);
  return *d;
}

std::vector<std::string> decimal_texts(const std::vector<Decimal>& values) {
  std::vector<std::string> out;
  out.reserve(values.size());
  for (const auto& v : values) out.push_back(v.to_string());
  return out;
}

bool all_digits(std::string_view s) {
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return !s.empty();
}

}  // namespace

std::string_view to_string(BomKind kind) { return kind == BomKind::kTbom ? "tbom" : "ibom"; }

std::string_view to_string(Certainty c) {
  switch (c) {
    case Certainty::kLow: return "low";
    case Certainty::kMedium: return "medium";
    case Certainty::kHigh: return "high";
  }
  return "low";
}

std::optional<Certainty> certainty_from_string(std::string_view text) {
  if (text == "low") return Certainty::kLow;
  if (text == "medium") return Certainty::kMedium;
  if (text == "high") return Certainty::kHigh;
  return std::nullopt;
}

DecisionOutcome decide(Decimal probability_poisonous, Decimal threshold) {
  DecisionOutcome out;
  const bool poisonous = probability_poisonous >= threshold;
  out.decision = std::string(poisonous ? kClassPoisonous : kClassEdible);
  out.distance_from_threshold = (probability_poisonous - threshold).abs();
  if (out.distance_from_threshold >= kHighCertaintyDistance) {
    out.certainty = Certainty::kHigh;
  } else if (out.distance_from_threshold >= kMediumCertaintyDistance) {
    out.certainty = Certainty::kMedium;
  } else {
    out.certainty = Certainty::kLow;
  }
  out.probability_edible = Decimal::from_integer(1) - probability_poisonous;
  out.confidence = poisonous ? probability_poisonous : out.probability_edible;
  return out;
}

Tbom build_tbom(const TrainingOutput& o) {
  auto need = [](bool present, const char* section) {
    if (!present) throw Error(ErrorCode::kConstruction, section);
  };
  need(o.project_metadata.has_value(), "project_metadata");
  need(o.data_summary.has_value(), "data_summary");
  need(o.model_architecture.has_value(), "model_architecture");
  need(o.training_methodology.has_value(), "training_methodology");
  need(o.performance_metrics.has_value(), "performance_metrics");
  need(o.environment.has_value() && !o.environment->component_versions.empty(), "environment");
  need(o.output_artifacts.has_value(), "output_artifacts");
  need(o.measurement.has_value() && !o.measurement->empty(), "measurement");

  Tbom t;
  t.project_metadata = *o.project_metadata;
  t.data_summary = *o.data_summary;
  t.model_architecture = *o.model_architecture;
  t.training_methodology = *o.training_methodology;
  t.performance_metrics = *o.performance_metrics;
  t.environment = *o.environment;
  t.output_artifacts = *o.output_artifacts;
  t.measurement = *o.measurement;
  return t;
}

Digest tbom_link_digest(const Tbom& tbom) {
  const json doc = tbom;
  const auto report = validate_bom(doc, BomKind::kTbom);
  if (!report.valid()) {
    throw Error(ErrorCode::kValidation, "tbom invalid: " + report.summary());
  }
  return canonical_digest(doc);
}

Ibom build_ibom(const Prediction& prediction, const FeatureAnalysis& analysis, InputMetadata input_meta,
                std::vector<PathwayStep> pathway, std::uint64_t duration_micros, RuntimeEnvironment env,
                const Digest& tbom_link) {
  if (pathway.size() < kMinimumPathwaySteps) {
    throw Error(ErrorCode::kConstruction, "decision_pathway needs at least 4 steps, got " +
                                              std::to_string(pathway.size()));
  }
  if (tbom_link.empty()) throw Error(ErrorCode::kConstruction, "tbom_link");
  Ibom ibom;
  ibom.inference_identification = {make_uuid_v4(), utc_timestamp_now(), tbom_link};
  ibom.input_metadata = std::move(input_meta);
  const auto outcome = decide(prediction.probability_poisonous, prediction.threshold);
  ibom.prediction = prediction;
  ibom.prediction.decision = outcome.decision;
  ibom.prediction.distance = outcome.distance_from_threshold;
  ibom.prediction.certainty = outcome.certainty;
  ibom.feature_analysis = analysis;
  ibom.decision_pathway = std::move(pathway);
  ibom.duration_micros = duration_micros;
  ibom.runtime_environment = std::move(env);
  return ibom;
}

std::string utc_timestamp_now() {
  using namespace std::chrono;
  const auto now = system_clock::now();
  const auto ms = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
  const std::time_t secs = system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

std::string make_uuid_v4() {
  internal::ensure_sodium();
  std::array<unsigned char, 16> b{};
  randombytes_buf(b.data(), b.size());
  b[6] = static_cast<unsigned char>((b[6] & 0x0f) | 0x40);
  b[8] = static_cast<unsigned char>((b[8] & 0x3f) | 0x80);
  char buf[37];
  std::snprintf(buf, sizeof buf,
                "%02x%02x%02x%02x-%02x%02x-%02x%02x-%02x%02x-%02x%02x%02x%02x%02x%02x", b[0], b[1], b[2],
                b[3], b[4], b[5], b[6], b[7], b[8], b[9], b[10], b[11], b[12], b[13], b[14], b[15]);
  return buf;
}

bool is_uuid(std::string_view s) {
  if (s.size() != 36) return false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (i == 8 || i == 13 || i == 18 || i == 23) {
      if (c != '-') return false;
    } else if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) {
      return false;
    }
  }
  return true;
}

bool is_rfc3339_utc_millis(std::string_view s) {
  // YYYY-MM-DDTHH:MM:SS.mmmZ
  if (s.size() != 24) return false;
  if (s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':' || s[16] != ':' || s[19] != '.' ||
      s[23] != 'Z') {
    return false;
  }
  if (!all_digits(s.substr(0, 4)) || !all_digits(s.substr(5, 2)) || !all_digits(s.substr(8, 2)) ||
      !all_digits(s.substr(11, 2)) || !all_digits(s.substr(14, 2)) || !all_digits(s.substr(17, 2)) ||
      !all_digits(s.substr(20, 3))) {
    return false;
  }
  auto num = [&](std::size_t pos, std::size_t len) { return std::stoi(std::string(s.substr(pos, len))); };
  const int month = num(5, 2), day = num(8, 2), hour = num(11, 2), minute = num(14, 2), second = num(17, 2);
  return month >= 1 && month <= 12 && day >= 1 && day <= 31 && hour <= 23 && minute <= 59 && second <= 60;
}

// ---------------------------------------------------------------------------
// JSON mapping

void to_json(json& j, const Tbom& t) {
  json layers = json::array();
  for (const auto& l : t.model_architecture.layers) {
    layers.push_back({{"name", l.name},
                      {"input_dim", l.input_dim},
                      {"output_dim", l.output_dim},
                      {"activation", l.activation}});
  }
  const auto& hp = t.training_methodology.hyperparameters;
  const auto& cv = t.performance_metrics.cv;
  j = json{
      {"project_metadata",
       {{"name", t.project_metadata.name},
        {"purpose", t.project_metadata.purpose},
        {"version", t.project_metadata.version},
        {"role_identity", t.project_metadata.role_identity}}},
      {"data_summary",
       {{"dataset_name", t.data_summary.dataset_name},
        {"dataset_digest", t.data_summary.dataset_digest},
        {"total_samples", t.data_summary.total_samples},
        {"class_distribution", t.data_summary.class_distribution},
        {"test_indices", t.data_summary.test_indices},
        {"fold_indices", t.data_summary.fold_indices}}},
      {"model_architecture",
       {{"kind", t.model_architecture.kind},
        {"layers", layers},
        {"concept_names", t.model_architecture.concept_names}}},
      {"training_methodology",
       {{"split_fraction_test", t.training_methodology.split_fraction_test.to_string()},
        {"cv_folds", t.training_methodology.cv_folds},
        {"hyperparameters",
         {{"learning_rate", hp.learning_rate.to_string()},
          {"epochs", hp.epochs},
          {"l2_lambda", hp.l2_lambda.to_string()},
          {"seed", hp.seed},
          {"optimizer", hp.optimizer}}},
        {"final_model_trained_on", t.training_methodology.final_model_trained_on}}},
      {"performance_metrics",
       {{"cv",
         {{"mean_accuracy", cv.mean_accuracy.to_string()},
          {"std_accuracy", cv.std_accuracy.to_string()},
          {"per_fold_accuracy", decimal_texts(cv.per_fold_accuracy)}}},
        {"final_test", t.performance_metrics.final_test}}},
      {"environment",
       {{"os", t.environment.os},
        {"cpu", t.environment.cpu},
        {"toolkit_version", t.environment.toolkit_version},
        {"component_versions", t.environment.component_versions}}},
      {"output_artifacts",
       {{"model_path", t.output_artifacts.model_path},
        {"model_digest", t.output_artifacts.model_digest},
        {"tbom_path", t.output_artifacts.tbom_path}}},
      {"measurement", t.measurement},
  };
}

void from_json(const json& j, Tbom& t) {
  try {
    const auto& pm = j.at("project_metadata");
    t.project_metadata = {pm.at("name").get<std::string>(), pm.at("purpose").get<std::string>(),
                          pm.at("version").get<std::string>(), pm.at("role_identity").get<std::string>()};

    const auto& ds = j.at("data_summary");
    t.data_summary.dataset_name = ds.at("dataset_name").get<std::string>();
    t.data_summary.dataset_digest = ds.at("dataset_digest").get<Digest>();
    t.data_summary.total_samples = ds.at("total_samples").get<std::uint64_t>();
    t.data_summary.class_distribution = ds.at("class_distribution").get<std::map<std::string, std::uint64_t>>();
    t.data_summary.test_indices = ds.at("test_indices").get<std::vector<std::uint64_t>>();
    t.data_summary.fold_indices = ds.at("fold_indices").get<std::vector<std::vector<std::uint64_t>>>();

    const auto& ma = j.at("model_architecture");
    t.model_architecture.kind = ma.at("kind").get<std::string>();
    t.model_architecture.layers.clear();
    for (const auto& l : ma.at("layers")) {
      t.model_architecture.layers.push_back({l.at("name").get<std::string>(),
                                             l.at("input_dim").get<std::uint64_t>(),
                                             l.at("output_dim").get<std::uint64_t>(),
                                             l.at("activation").get<std::string>()});
    }
    t.model_architecture.concept_names = ma.at("concept_names").get<std::vector<std::string>>();

    const auto& tm = j.at("training_methodology");
    t.training_methodology.split_fraction_test = decimal_field(tm, "split_fraction_test");
    t.training_methodology.cv_folds = tm.at("cv_folds").get<std::uint64_t>();
    const auto& hp = tm.at("hyperparameters");
    t.training_methodology.hyperparameters = {decimal_field(hp, "learning_rate"), hp.at("epochs").get<std::uint64_t>(),
                                              decimal_field(hp, "l2_lambda"), hp.at("seed").get<std::uint64_t>(),
                                              hp.at("optimizer").get<std::string>()};
    t.training_methodology.final_model_trained_on = tm.at("final_model_trained_on").get<std::string>();

    const auto& perf = j.at("performance_metrics");
    const auto& cv = perf.at("cv");
    t.performance_metrics.cv.mean_accuracy = decimal_field(cv, "mean_accuracy");
    t.performance_metrics.cv.std_accuracy = decimal_field(cv, "std_accuracy");
    t.performance_metrics.cv.per_fold_accuracy.clear();
    for (const auto& v : cv.at("per_fold_accuracy")) {
      auto d = Decimal::parse(v.get<std::string>());
      if (!d) throw Error(ErrorCode::kFormat, "malformed per_fold_accuracy");
      t.performance_metrics.cv.per_fold_accuracy.push_back(*d);
    }
    t.performance_metrics.final_test = perf.at("final_test").get<Metrics>();

    const auto& env = j.at("environment");
    t.environment = {env.at("os").get<std::string>(), env.at("cpu").get<std::string>(),
                     env.at("toolkit_version").get<std::string>(),
                     env.at("component_versions").get<std::map<std::string, std::string>>()};

    const auto& oa = j.at("output_artifacts");
    t.output_artifacts = {oa.at("model_path").get<std::string>(), oa.at("model_digest").get<Digest>(),
                          oa.at("tbom_path").get<std::string>()};
    t.measurement = j.at("measurement").get<Digest>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("tbom: ") + e.what());
  }
}

void to_json(json& j, const Ibom& i) {
  const auto outcome = decide(i.prediction.probability_poisonous, i.prediction.threshold);
  json contributions = json::array();
  for (const auto& c : i.feature_analysis.concept_contributions) {
    contributions.push_back({{"concept", c.concept_name}, {"contribution", c.contribution.to_string()}});
  }
  json pathway = json::array();
  for (const auto& s : i.decision_pathway) {
    pathway.push_back({{"step", s.step}, {"input_digest", s.input_digest}, {"output_digest", s.output_digest}});
  }
  j = json{
      {"inference_identification",
       {{"inference_id", i.inference_identification.inference_id},
        {"timestamp", i.inference_identification.timestamp},
        {"tbom_link", i.inference_identification.tbom_link}}},
      {"input_metadata",
       {{"input_id", i.input_metadata.input_id},
        {"raw_features", i.input_metadata.raw_features},
        {"encoded_dimensions", i.input_metadata.encoded_dimensions},
        {"preprocessing", i.input_metadata.preprocessing}}},
      {"inference_results",
       {{"raw_model_output",
         {{"logit", i.prediction.logit.to_string()},
          {"probabilities",
           {{std::string(kClassEdible), outcome.probability_edible.to_string()},
            {std::string(kClassPoisonous), i.prediction.probability_poisonous.to_string()}}}}},
        {"decision_metrics",
         {{"decision", i.prediction.decision},
          {"confidence", outcome.confidence.to_string()},
          {"threshold", i.prediction.threshold.to_string()},
          {"distance_from_threshold", i.prediction.distance.to_string()},
          {"certainty_level", std::string(to_string(i.prediction.certainty))}}},
        {"feature_analysis",
         {{"concept_contributions", contributions}, {"bias", i.feature_analysis.bias.to_string()}}}}},
      {"decision_pathway", pathway},
      {"temporal_inference_data", {{"duration_micros", i.duration_micros}}},
      {"runtime_environment",
       {{"os", i.runtime_environment.os},
        {"cpu", i.runtime_environment.cpu},
        {"toolkit_version", i.runtime_environment.toolkit_version},
        {"serving_system", i.runtime_environment.serving_system}}},
  };
}

void from_json(const json& j, Ibom& i) {
  try {
    const auto& id = j.at("inference_identification");
    i.inference_identification = {id.at("inference_id").get<std::string>(), id.at("timestamp").get<std::string>(),
                                  id.at("tbom_link").get<Digest>()};
    const auto& in = j.at("input_metadata");
    i.input_metadata = {in.at("input_id").get<std::string>(),
                        in.at("raw_features").get<std::map<std::string, std::string>>(),
                        in.at("encoded_dimensions").get<std::uint64_t>(), in.at("preprocessing").get<std::string>()};
    const auto& res = j.at("inference_results");
    const auto& raw = res.at("raw_model_output");
    const auto& dm = res.at("decision_metrics");
    i.prediction.logit = decimal_field(raw, "logit");
    i.prediction.probability_poisonous = decimal_field(raw.at("probabilities"), "poisonous");
    i.prediction.threshold = decimal_field(dm, "threshold");
    i.prediction.decision = dm.at("decision").get<std::string>();
    i.prediction.distance = decimal_field(dm, "distance_from_threshold");
    auto certainty = certainty_from_string(dm.at("certainty_level").get<std::string>());
    if (!certainty) throw Error(ErrorCode::kFormat, "ibom: unknown certainty level");
    i.prediction.certainty = *certainty;
    const auto& fa = res.at("feature_analysis");
    i.feature_analysis.concept_contributions.clear();
    for (const auto& c : fa.at("concept_contributions")) {
      i.feature_analysis.concept_contributions.push_back(
          {c.at("concept").get<std::string>(), decimal_field(c, "contribution")});
    }
    i.feature_analysis.bias = decimal_field(fa, "bias");
    i.decision_pathway.clear();
    for (const auto& s : j.at("decision_pathway")) {
      i.decision_pathway.push_back(
          {s.at("step").get<std::string>(), s.at("input_digest").get<Digest>(), s.at("output_digest").get<Digest>()});
    }
    i.duration_micros = j.at("temporal_inference_data").at("duration_micros").get<std::uint64_t>();
    const auto& env = j.at("runtime_environment");
    i.runtime_environment = {env.at("os").get<std::string>(), env.at("cpu").get<std::string>(),
                             env.at("toolkit_version").get<std::string>(),
                             env.at("serving_system").get<std::string>()};
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("ibom: ") + e.what());
  }
}

}  // namespace dbom
