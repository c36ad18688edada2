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

#include <gtest/gtest.h>
#include <openssl/sha.h>

#include <random>

#include <nlohmann/json.hpp>

#include "bom_fixtures.hpp"
#include "dbom/bom.hpp"
#include "dbom/canonical.hpp"
#include "dbom/encoding.hpp"
#include "dbom/error.hpp"
#include "dbom/validate.hpp"

namespace dbom {
namespace {

using json = nlohmann::json;
using testing::dec;

bool has_violation(const ValidationReport& r, const std::string& path) {
  for (const auto& v : r.violations)
    if (v.path == path) return true;
  return false;
}

TEST(BuildTbom, NamesFirstMissingSection) {
  const char* sections[] = {"project_metadata", "data_summary", "model_architecture", "training_methodology",
                            "performance_metrics", "environment", "output_artifacts", "measurement"};
  for (int i = 0; i < 8; ++i) {
    auto o = testing::toy_training_output();
    switch (i) {
      case 0: o.project_metadata.reset(); break;
      case 1: o.data_summary.reset(); break;
      case 2: o.model_architecture.reset(); break;
      case 3: o.training_methodology.reset(); break;
      case 4: o.performance_metrics.reset(); break;
      case 5: o.environment->component_versions.clear(); break;
      case 6: o.output_artifacts.reset(); break;
      case 7: o.measurement.reset(); break;
    }
    try {
      build_tbom(o);
      FAIL() << sections[i];
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kConstruction);
      EXPECT_EQ(std::string(e.what()), sections[i]);
    }
  }
}

TEST(BuildTbom, DeterministicBytes) {
  const json a = testing::toy_tbom();
  const json b = testing::toy_tbom();
  EXPECT_EQ(canonicalize(a), canonicalize(b));
  EXPECT_TRUE(validate_bom(a, BomKind::kTbom).valid()) << validate_bom(a, BomKind::kTbom).summary();
}

TEST(BuildTbom, JsonRoundTrip) {
  const Tbom t = testing::toy_tbom();
  const json j = t;
  EXPECT_EQ(j.get<Tbom>(), t);
  EXPECT_EQ(detect_bom_kind(j), BomKind::kTbom);
}

TEST(ValidateTbom, ReportsMetricPath) {
  json j = testing::toy_tbom();
  j["performance_metrics"]["final_test"]["accuracy"] = "0.500000000";
  const auto r = validate_bom(j, BomKind::kTbom);
  EXPECT_FALSE(r.valid());
  EXPECT_TRUE(has_violation(r, "performance_metrics.final_test.accuracy")) << r.summary();
}

TEST(ValidateTbom, ShortDigestHex) {
  json j = testing::toy_tbom();
  j["output_artifacts"]["model_digest"]["hex"] = std::string(63, 'a');
  const auto r = validate_bom(j, BomKind::kTbom);
  EXPECT_TRUE(has_violation(r, "output_artifacts.model_digest.hex")) << r.summary();
}

TEST(ValidateTbom, CollectsEveryViolation) {
  json j = testing::toy_tbom();
  j.erase("environment");
  j["data_summary"]["total_samples"] = "ten";
  j["training_methodology"]["cv_folds"] = 3;
  const auto r = validate_bom(j, BomKind::kTbom);
  EXPECT_TRUE(has_violation(r, "environment"));
  EXPECT_TRUE(has_violation(r, "data_summary.total_samples"));
  EXPECT_TRUE(has_violation(r, "data_summary.fold_indices"));
  EXPECT_TRUE(has_violation(r, "performance_metrics.cv.per_fold_accuracy"));
}

TEST(ValidateTbom, SplitMustPartition) {
  json j = testing::toy_tbom();
  j["data_summary"]["fold_indices"][0] = {1, 2, 3};
  EXPECT_TRUE(has_violation(validate_bom(j, BomKind::kTbom), "data_summary.fold_indices"));
  j["data_summary"]["fold_indices"][0] = {0, 1, 2, 3, 4};
  EXPECT_TRUE(has_violation(validate_bom(j, BomKind::kTbom), "data_summary.fold_indices"));
}

TEST(ValidateTbom, RejectsNonCanonicalDecimal) {
  json j = testing::toy_tbom();
  j["training_methodology"]["split_fraction_test"] = "0.2";
  EXPECT_TRUE(has_violation(validate_bom(j, BomKind::kTbom), "training_methodology.split_fraction_test"));
}

TEST(Decide, Examples) {
  auto o = decide(dec("0.73"), dec("0.5"));
  EXPECT_EQ(o.decision, "poisonous");
  EXPECT_EQ(o.distance_from_threshold.to_string(), "0.230000000");
  EXPECT_EQ(o.certainty, Certainty::kMedium);
  EXPECT_EQ(o.confidence.to_string(), "0.730000000");
  EXPECT_EQ(o.probability_edible.to_string(), "0.270000000");

  auto tie = decide(dec("0.5"), dec("0.5"));
  EXPECT_EQ(tie.decision, "poisonous");
  EXPECT_EQ(tie.certainty, Certainty::kLow);

  EXPECT_EQ(decide(dec("0.9"), dec("0.5")).certainty, Certainty::kHigh);
  EXPECT_EQ(decide(dec("0.1"), dec("0.5")).certainty, Certainty::kHigh);
  EXPECT_EQ(decide(dec("0.35"), dec("0.5")).certainty, Certainty::kMedium);
  EXPECT_EQ(decide(dec("0.35"), dec("0.5")).decision, "edible");
  EXPECT_EQ(decide(dec("0.350000001"), dec("0.5")).certainty, Certainty::kLow);
}

TEST(BuildIbom, ShortPathwayRefused) {
  auto steps = testing::toy_pathway();
  steps.pop_back();
  Prediction p;
  p.probability_poisonous = dec("0.5");
  p.threshold = dec("0.5");
  EXPECT_THROW(build_ibom(p, {}, {}, steps, 0, {}, Digest::of("t")), Error);
}

TEST(BuildIbom, ValidAndIdentifiable) {
  const Ibom ibom = testing::toy_ibom(Digest::of("tbom"));
  const json j = ibom;
  const auto r = validate_bom(j, BomKind::kIbom);
  EXPECT_TRUE(r.valid()) << r.summary();
  EXPECT_TRUE(is_uuid(ibom.inference_identification.inference_id));
  EXPECT_TRUE(is_rfc3339_utc_millis(ibom.inference_identification.timestamp));
  EXPECT_EQ(ibom.prediction.decision, "poisonous");
  EXPECT_EQ(ibom.prediction.certainty, Certainty::kMedium);
  EXPECT_EQ(j.get<Ibom>(), ibom);
  EXPECT_EQ(detect_bom_kind(j), BomKind::kIbom);
}

TEST(ValidateIbom, InternalIdentities) {
  const json base = testing::toy_ibom(Digest::of("tbom"));
  {
    json j = base;
    j["inference_results"]["raw_model_output"]["probabilities"]["poisonous"] = "0.729995560";
    const auto r = validate_bom(j, BomKind::kIbom);
    EXPECT_TRUE(has_violation(r, "inference_results.raw_model_output.probabilities.poisonous")) << r.summary();
  }
  {
    json j = base;
    j["inference_results"]["decision_metrics"]["decision"] = "edible";
    EXPECT_TRUE(has_violation(validate_bom(j, BomKind::kIbom), "inference_results.decision_metrics.decision"));
  }
  {
    json j = base;
    j["inference_results"]["feature_analysis"]["bias"] = "0.594600001";
    EXPECT_TRUE(has_violation(validate_bom(j, BomKind::kIbom),
                              "inference_results.feature_analysis.concept_contributions"));
  }
  {
    json j = base;
    j["decision_pathway"][1]["step"] = "skipped";
    EXPECT_TRUE(has_violation(validate_bom(j, BomKind::kIbom), "decision_pathway"));
  }
  {
    json j = base;
    j["inference_identification"]["timestamp"] = "2026-10-16 03:41:07";
    EXPECT_TRUE(has_violation(validate_bom(j, BomKind::kIbom), "inference_identification.timestamp"));
  }
}

// Link digest recomputed with nlohmann's sorted compact dump (identical to the
// canonical form for ASCII documents) and OpenSSL.
TEST(LinkDigest, MatchesIndependentComputation) {
  const Tbom t = testing::toy_tbom();
  const std::string bytes = json(t).dump();
  unsigned char md[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(), md);
  EXPECT_EQ(tbom_link_digest(t).hex(), hex_encode(std::span<const unsigned char>(md, sizeof md)));
}

TEST(LinkDigest, RefusesInvalidTbom) {
  Tbom t = testing::toy_tbom();
  t.performance_metrics.final_test.accuracy = dec("0.1");
  EXPECT_THROW(tbom_link_digest(t), Error);
}

// Generated TBOMs with consistent metrics always validate; breaking the
// accuracy identity always produces exactly that violation.
TEST(ValidateProperty, GeneratedMetricsValidate) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 300; ++i) {
    auto o = testing::toy_training_output();
    const auto tp = rng() % 50, fp = rng() % 50, tn = rng() % 50, fn = rng() % 50 + 1;
    o.performance_metrics->final_test = metrics_from_counts(tp, fp, tn, fn);
    const auto a = Decimal::from_units(static_cast<std::int64_t>(rng() % 1'000'000'001));
    const auto b = Decimal::from_units(static_cast<std::int64_t>(rng() % 1'000'000'001));
    o.performance_metrics->cv.per_fold_accuracy = {a, b};
    const Decimal pair[] = {a, b};
    o.performance_metrics->cv.mean_accuracy = exact_mean(pair);
    json j = build_tbom(o);
    ASSERT_TRUE(validate_bom(j, BomKind::kTbom).valid()) << validate_bom(j, BomKind::kTbom).summary();
    auto acc = *Decimal::parse(j["performance_metrics"]["final_test"]["accuracy"].get<std::string>());
    acc = acc == Decimal::from_integer(1) ? acc - Decimal::from_units(1) : acc + Decimal::from_units(1);
    j["performance_metrics"]["final_test"]["accuracy"] = acc.to_string();
    const auto r = validate_bom(j, BomKind::kTbom);
    ASSERT_EQ(r.violations.size(), 1u) << r.summary();
    EXPECT_EQ(r.violations[0].path, "performance_metrics.final_test.accuracy");
  }
}

TEST(ExactMean, HalfEven) {
  const Decimal v[] = {Decimal::from_units(1), Decimal::from_units(2)};
  EXPECT_EQ(exact_mean(v).units(), 2);  // 1.5 units rounds to 2
  const Decimal w[] = {Decimal::from_units(1), Decimal::from_units(0)};
  EXPECT_EQ(exact_mean(w).units(), 0);  // 0.5 units rounds to 0
}

}  // namespace
}  // namespace dbom
