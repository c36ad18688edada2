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

#ifndef DBOM_TESTS_BOM_FIXTURES_HPP_
#define DBOM_TESTS_BOM_FIXTURES_HPP_

#include <string>
#include <vector>

#include "dbom/bom.hpp"
#include "dbom/decimal.hpp"
#include "dbom/digest.hpp"
#include "dbom/metrics.hpp"

namespace dbom::testing {

inline Decimal dec(const char* text) { return *Decimal::parse_lenient(text); }

/// Ten-sample TBOM: two test rows and two folds of four.
inline TrainingOutput toy_training_output() {
  TrainingOutput o;
  o.project_metadata = ProjectMetadata{"toy", "unit tests", "0.0.1", "model-provider"};
  DataSummary ds;
  ds.dataset_name = "toy";
  ds.dataset_digest = Digest::of("toy-bytes");
  ds.total_samples = 10;
  ds.class_distribution = {{"edible", 6}, {"poisonous", 4}};
  ds.test_indices = {0, 5};
  ds.fold_indices = {{1, 2, 3, 4}, {6, 7, 8, 9}};
  o.data_summary = ds;
  o.model_architecture = ModelArchitecture{"linear-concept-head/logistic", {{"concept-head", 3, 1, "sigmoid"}},
                                           {"a=x", "b=y", "c=z"}};
  o.training_methodology =
      TrainingMethodology{dec("0.2"), 2, {dec("0.1"), 300, dec("0.0001"), 42, "full-batch gradient descent"},
                          "all non-test samples"};
  o.performance_metrics =
      PerformanceMetrics{{dec("0.875"), dec("0.125"), {dec("0.75"), dec("1")}}, metrics_from_counts(1, 0, 1, 0)};
  o.environment = EnvironmentRecord{"Linux", "x86_64", "0.3.0", {{"compiler", "test"}}};
  o.output_artifacts = OutputArtifacts{"model.json", Digest::of("model"), "tbom.dbom.json"};
  o.measurement = Digest::of("measurement");
  return o;
}

inline Tbom toy_tbom() { return build_tbom(toy_training_output()); }

inline std::vector<PathwayStep> toy_pathway() {
  std::vector<PathwayStep> steps;
  for (const char* name : {"decode-input", "verify-model", "encode", "predict"}) {
    steps.push_back({name, Digest::of(std::string(name) + "-in"), Digest::of(std::string(name) + "-out")});
  }
  return steps;
}

/// TBOM whose final test has `correct` of 100 positives right.
inline Tbom toy_tbom_with_accuracy(std::uint64_t correct) {
  auto o = toy_training_output();
  o.performance_metrics->final_test = metrics_from_counts(correct, 0, 0, 100 - correct);
  return build_tbom(o);
}

/// IBOM for logit 0.9946 = 0.7 - 0.3 + 0.5946 (medium certainty), or with
/// `low_certainty` a zero logit sitting on the threshold.
inline Ibom toy_ibom(const Digest& tbom_link, bool low_certainty = false) {
  Prediction p;
  p.logit = dec("0.9946");
  p.probability_poisonous = dec("0.729995550");
  p.threshold = dec("0.5");
  FeatureAnalysis fa{{{"a=x", dec("0.7")}, {"b=y", dec("-0.3")}}, dec("0.5946")};
  if (low_certainty) {
    p.logit = Decimal();
    p.probability_poisonous = dec("0.5");
    fa = FeatureAnalysis{{{"a=x", Decimal()}, {"b=y", Decimal()}}, Decimal()};
  }
  InputMetadata in{"input-1", {{"a", "x"}, {"b", "y"}}, 3, "one-hot"};
  return build_ibom(p, fa, in, toy_pathway(), 1234, RuntimeEnvironment{"Linux", "x86_64", "0.3.0", "test"},
                    tbom_link);
}

}  // namespace dbom::testing

#endif  // DBOM_TESTS_BOM_FIXTURES_HPP_
