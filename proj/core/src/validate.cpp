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

#include "dbom/validate.hpp"

#include <cmath>
#include <set>

#include "int128.hpp"

namespace dbom {

namespace {

using json = nlohmann::json;

const Decimal kZero = Decimal::from_integer(0);
const Decimal kOne = Decimal::from_integer(1);

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : path + "." + std::string(key);
}

// Small typed accessor layer: every accessor either returns the value or
// records exactly one violation at the field's path.
class Walker {
 public:
  explicit Walker(ValidationReport& report) : report_(report) {}

  void fail(const std::string& path, std::string message) {
    report_.violations.push_back({path, std::move(message)});
  }

  const json* member(const json& parent, const std::string& parent_path, std::string_view key) {
    const auto path = join(parent_path, key);
    if (!parent.is_object()) return nullptr;
    auto it = parent.find(std::string(key));
    if (it == parent.end()) {
      fail(path, "missing required field");
      return nullptr;
    }
    return &*it;
  }

  const json* object(const json& parent, const std::string& parent_path, std::string_view key) {
    const json* node = member(parent, parent_path, key);
    if (node && !node->is_object()) {
      fail(join(parent_path, key), "expected object");
      return nullptr;
    }
    return node;
  }

  const json* array(const json& parent, const std::string& parent_path, std::string_view key) {
    const json* node = member(parent, parent_path, key);
    if (node && !node->is_array()) {
      fail(join(parent_path, key), "expected array");
      return nullptr;
    }
    return node;
  }

  std::optional<std::string> text(const json& parent, const std::string& parent_path, std::string_view key) {
    const json* node = member(parent, parent_path, key);
    if (!node) return std::nullopt;
    if (!node->is_string()) {
      fail(join(parent_path, key), "expected text");
      return std::nullopt;
    }
    return node->get<std::string>();
  }

  std::optional<std::uint64_t> count(const json& node, const std::string& path) {
    if (!node.is_number_unsigned() && !(node.is_number_integer() && node.get<std::int64_t>() >= 0)) {
      fail(path, "expected unsigned integer");
      return std::nullopt;
    }
    return node.get<std::uint64_t>();
  }

  std::optional<std::uint64_t> count(const json& parent, const std::string& parent_path, std::string_view key) {
    const json* node = member(parent, parent_path, key);
    if (!node) return std::nullopt;
    return count(*node, join(parent_path, key));
  }

  std::optional<Decimal> decimal(const json& node, const std::string& path) {
    if (!node.is_string()) {
      fail(path, "expected decimal text");
      return std::nullopt;
    }
    auto d = Decimal::parse(node.get<std::string>());
    if (!d) fail(path, "expected decimal text with exactly 9 fractional digits");
    return d;
  }

  std::optional<Decimal> decimal(const json& parent, const std::string& parent_path, std::string_view key) {
    const json* node = member(parent, parent_path, key);
    if (!node) return std::nullopt;
    return decimal(*node, join(parent_path, key));
  }

  std::optional<Decimal> unit_interval(const json& parent, const std::string& parent_path, std::string_view key) {
    auto d = decimal(parent, parent_path, key);
    if (d && (*d < kZero || *d > kOne)) {
      fail(join(parent_path, key), "value outside [0,1]");
      return std::nullopt;
    }
    return d;
  }

  std::optional<Digest> digest(const json& parent, const std::string& parent_path, std::string_view key) {
    const auto path = join(parent_path, key);
    const json* node = object(parent, parent_path, key);
    if (!node) return std::nullopt;
    bool ok = true;
    auto algorithm = text(*node, path, "algorithm");
    if (algorithm && *algorithm != Digest::kAlgorithm) {
      fail(join(path, "algorithm"), "unsupported digest algorithm");
      ok = false;
    }
    auto hex = text(*node, path, "hex");
    if (hex && !Digest::is_valid_hex(*hex)) {
      fail(join(path, "hex"), "expected 64 lowercase hex characters");
      ok = false;
    }
    if (!ok || !algorithm || !hex) return std::nullopt;
    return Digest::from_hex(*hex);
  }

  std::optional<std::vector<std::uint64_t>> index_list(const json& node, const std::string& path) {
    if (!node.is_array()) {
      fail(path, "expected array");
      return std::nullopt;
    }
    std::vector<std::uint64_t> out;
    bool ok = true;
    for (std::size_t i = 0; i < node.size(); ++i) {
      auto v = count(node[i], join(path, std::to_string(i)));
      if (v) out.push_back(*v);
      else ok = false;
    }
    if (!ok) return std::nullopt;
    return out;
  }

  void string_map(const json& parent, const std::string& parent_path, std::string_view key, bool non_empty) {
    const auto path = join(parent_path, key);
    const json* node = object(parent, parent_path, key);
    if (!node) return;
    if (non_empty && node->empty()) fail(path, "must not be empty");
    for (const auto& [k, v] : node->items()) {
      if (!v.is_string()) fail(join(path, k), "expected text");
    }
  }

 private:
  ValidationReport& report_;
};

// ---------------------------------------------------------------------------

void validate_metrics(Walker& w, const json& node, const std::string& path) {
  auto accuracy = w.unit_interval(node, path, "accuracy");
  auto rate = [&](std::string_view key) -> std::optional<std::optional<Decimal>> {
    const json* v = w.member(node, path, key);
    if (!v) return std::nullopt;
    if (v->is_string() && v->get<std::string>() == kUndefinedRate) return std::optional<Decimal>{};
    auto d = w.unit_interval(node, path, key);
    if (!d) return std::nullopt;
    return std::optional<Decimal>{d};
  };
  auto sensitivity = rate("sensitivity");
  auto specificity = rate("specificity");
  auto tp = w.count(node, path, "true_positives");
  auto fp = w.count(node, path, "false_positives");
  auto tn = w.count(node, path, "true_negatives");
  auto fn = w.count(node, path, "false_negatives");
  if (!tp || !fp || !tn || !fn) return;
  const std::uint64_t total = *tp + *fp + *tn + *fn;
  if (total == 0) {
    w.fail(path, "confusion matrix is empty");
    return;
  }
  const auto expected = metrics_from_counts(*tp, *fp, *tn, *fn);
  if (accuracy && *accuracy != expected.accuracy) {
    w.fail(join(path, "accuracy"), "does not equal (tp+tn)/total");
  }
  if (sensitivity && *sensitivity != expected.sensitivity) {
    w.fail(join(path, "sensitivity"), "does not equal tp/(tp+fn)");
  }
  if (specificity && *specificity != expected.specificity) {
    w.fail(join(path, "specificity"), "does not equal tn/(tn+fp)");
  }
}

void validate_tbom(Walker& w, const json& doc) {
  std::optional<std::uint64_t> cv_folds;
  std::optional<std::uint64_t> fold_list_count;

  if (const json* pm = w.object(doc, "", "project_metadata")) {
    for (auto key : {"name", "purpose", "version", "role_identity"}) w.text(*pm, "project_metadata", key);
  }

  if (const json* ds = w.object(doc, "", "data_summary")) {
    const std::string p = "data_summary";
    w.text(*ds, p, "dataset_name");
    w.digest(*ds, p, "dataset_digest");
    auto total = w.count(*ds, p, "total_samples");
    if (const json* cd = w.object(*ds, p, "class_distribution")) {
      std::uint64_t sum = 0;
      bool ok = true;
      for (const auto& [k, v] : cd->items()) {
        auto n = w.count(v, join(join(p, "class_distribution"), k));
        if (n) sum += *n;
        else ok = false;
      }
      if (ok && total && sum != *total) w.fail(join(p, "class_distribution"), "class counts do not sum to total_samples");
    }
    std::optional<std::vector<std::uint64_t>> test;
    if (const json* ti = w.member(*ds, p, "test_indices")) test = w.index_list(*ti, join(p, "test_indices"));
    std::optional<std::vector<std::vector<std::uint64_t>>> folds;
    if (const json* fi = w.array(*ds, p, "fold_indices")) {
      fold_list_count = fi->size();
      std::vector<std::vector<std::uint64_t>> lists;
      bool ok = true;
      for (std::size_t i = 0; i < fi->size(); ++i) {
        auto l = w.index_list((*fi)[i], join(join(p, "fold_indices"), std::to_string(i)));
        if (l) lists.push_back(std::move(*l));
        else ok = false;
      }
      if (ok) folds = std::move(lists);
    }
    if (test && folds && total) {
      std::vector<int> seen(*total, 0);
      bool out_of_range = false, overlap = false;
      auto mark = [&](std::uint64_t idx, int tag) {
        if (idx >= *total) {
          out_of_range = true;
          return;
        }
        if (seen[idx] != 0) overlap = true;
        seen[idx] = tag;
      };
      for (auto idx : *test) mark(idx, 1);
      for (const auto& f : *folds)
        for (auto idx : f) mark(idx, 2);
      if (out_of_range) w.fail(p, "split index outside [0, total_samples)");
      if (overlap) w.fail(join(p, "fold_indices"), "test and fold indices are not pairwise disjoint");
      if (!out_of_range && !overlap) {
        for (int s : seen) {
          if (s == 0) {
            w.fail(join(p, "fold_indices"), "folds do not partition the non-test indices");
            break;
          }
        }
      }
    }
  }

  if (const json* ma = w.object(doc, "", "model_architecture")) {
    const std::string p = "model_architecture";
    w.text(*ma, p, "kind");
    if (const json* layers = w.array(*ma, p, "layers")) {
      if (layers->empty()) w.fail(join(p, "layers"), "must not be empty");
      for (std::size_t i = 0; i < layers->size(); ++i) {
        const auto lp = join(join(p, "layers"), std::to_string(i));
        const json& l = (*layers)[i];
        if (!l.is_object()) {
          w.fail(lp, "expected object");
          continue;
        }
        w.text(l, lp, "name");
        w.count(l, lp, "input_dim");
        w.count(l, lp, "output_dim");
        w.text(l, lp, "activation");
      }
    }
    if (const json* names = w.array(*ma, p, "concept_names")) {
      for (std::size_t i = 0; i < names->size(); ++i) {
        if (!(*names)[i].is_string()) w.fail(join(join(p, "concept_names"), std::to_string(i)), "expected text");
      }
    }
  }

  if (const json* tm = w.object(doc, "", "training_methodology")) {
    const std::string p = "training_methodology";
    auto frac = w.decimal(*tm, p, "split_fraction_test");
    if (frac && (*frac <= kZero || *frac >= kOne)) w.fail(join(p, "split_fraction_test"), "must lie in (0,1)");
    cv_folds = w.count(*tm, p, "cv_folds");
    if (cv_folds && *cv_folds < 2) w.fail(join(p, "cv_folds"), "must be at least 2");
    if (const json* hp = w.object(*tm, p, "hyperparameters")) {
      const auto hpp = join(p, "hyperparameters");
      w.decimal(*hp, hpp, "learning_rate");
      w.count(*hp, hpp, "epochs");
      w.decimal(*hp, hpp, "l2_lambda");
      w.count(*hp, hpp, "seed");
      w.text(*hp, hpp, "optimizer");
    }
    w.text(*tm, p, "final_model_trained_on");
  }
  if (cv_folds && fold_list_count && *cv_folds != *fold_list_count) {
    w.fail("data_summary.fold_indices", "number of folds differs from cv_folds");
  }

  if (const json* perf = w.object(doc, "", "performance_metrics")) {
    const std::string p = "performance_metrics";
    if (const json* cv = w.object(*perf, p, "cv")) {
      const auto cvp = join(p, "cv");
      auto mean = w.unit_interval(*cv, cvp, "mean_accuracy");
      w.unit_interval(*cv, cvp, "std_accuracy");
      if (const json* folds = w.array(*cv, cvp, "per_fold_accuracy")) {
        std::vector<Decimal> values;
        bool ok = true;
        for (std::size_t i = 0; i < folds->size(); ++i) {
          const auto fp = join(join(cvp, "per_fold_accuracy"), std::to_string(i));
          auto d = w.decimal((*folds)[i], fp);
          if (d && (*d < kZero || *d > kOne)) {
            w.fail(fp, "value outside [0,1]");
            d.reset();
          }
          if (d) values.push_back(*d);
          else ok = false;
        }
        if (cv_folds && folds->size() != *cv_folds) {
          w.fail(join(cvp, "per_fold_accuracy"), "length differs from cv_folds");
        }
        if (ok && mean && !values.empty() && exact_mean(values) != *mean) {
          w.fail(join(cvp, "mean_accuracy"), "does not equal the mean of per_fold_accuracy");
        }
      }
    }
    if (const json* ft = w.object(*perf, p, "final_test")) validate_metrics(w, *ft, join(p, "final_test"));
  }

  if (const json* env = w.object(doc, "", "environment")) {
    for (auto key : {"os", "cpu", "toolkit_version"}) w.text(*env, "environment", key);
    w.string_map(*env, "environment", "component_versions", true);
  }

  if (const json* oa = w.object(doc, "", "output_artifacts")) {
    w.text(*oa, "output_artifacts", "model_path");
    w.digest(*oa, "output_artifacts", "model_digest");
    w.text(*oa, "output_artifacts", "tbom_path");
  }

  w.digest(doc, "", "measurement");
}

void validate_ibom(Walker& w, const json& doc) {
  if (const json* id = w.object(doc, "", "inference_identification")) {
    const std::string p = "inference_identification";
    auto uuid = w.text(*id, p, "inference_id");
    if (uuid && !is_uuid(*uuid)) w.fail(join(p, "inference_id"), "expected UUID");
    auto ts = w.text(*id, p, "timestamp");
    if (ts && !is_rfc3339_utc_millis(*ts)) w.fail(join(p, "timestamp"), "expected RFC 3339 UTC timestamp");
    w.digest(*id, p, "tbom_link");
  }

  if (const json* in = w.object(doc, "", "input_metadata")) {
    const std::string p = "input_metadata";
    w.text(*in, p, "input_id");
    w.string_map(*in, p, "raw_features", false);
    w.count(*in, p, "encoded_dimensions");
    w.text(*in, p, "preprocessing");
  }

  if (const json* res = w.object(doc, "", "inference_results")) {
    const std::string p = "inference_results";
    std::optional<Decimal> logit, p_poison, p_edible, threshold;
    if (const json* raw = w.object(*res, p, "raw_model_output")) {
      const auto rp = join(p, "raw_model_output");
      logit = w.decimal(*raw, rp, "logit");
      if (const json* probs = w.object(*raw, rp, "probabilities")) {
        const auto pp = join(rp, "probabilities");
        p_edible = w.unit_interval(*probs, pp, kClassEdible);
        p_poison = w.unit_interval(*probs, pp, kClassPoisonous);
        if (p_edible && p_poison && *p_edible + *p_poison != kOne) w.fail(pp, "class probabilities do not sum to 1");
      }
      if (logit && p_poison) {
        const double sig = 1.0 / (1.0 + std::exp(-logit->to_double()));
        // One unit of slack absorbs last-ulp differences between libm
        // implementations of exp.
        const auto expected = Decimal::from_double(sig);
        if ((expected - *p_poison).abs() > Decimal::from_units(1)) {
          w.fail(join(join(rp, "probabilities"), "poisonous"), "does not equal sigmoid(logit)");
        }
      }
    }
    if (const json* dm = w.object(*res, p, "decision_metrics")) {
      const auto dp = join(p, "decision_metrics");
      auto decision = w.text(*dm, dp, "decision");
      if (decision && *decision != kClassEdible && *decision != kClassPoisonous) {
        w.fail(join(dp, "decision"), "unknown class");
        decision.reset();
      }
      auto confidence = w.unit_interval(*dm, dp, "confidence");
      threshold = w.decimal(*dm, dp, "threshold");
      if (threshold && (*threshold <= kZero || *threshold >= kOne)) {
        w.fail(join(dp, "threshold"), "must lie in (0,1)");
        threshold.reset();
      }
      auto distance = w.decimal(*dm, dp, "distance_from_threshold");
      auto certainty_text = w.text(*dm, dp, "certainty_level");
      std::optional<Certainty> certainty;
      if (certainty_text) {
        certainty = certainty_from_string(*certainty_text);
        if (!certainty) w.fail(join(dp, "certainty_level"), "expected low, medium or high");
      }
      if (p_poison && threshold) {
        const auto outcome = decide(*p_poison, *threshold);
        if (decision && *decision != outcome.decision) w.fail(join(dp, "decision"), "inconsistent with probability and threshold");
        if (distance && *distance != outcome.distance_from_threshold) {
          w.fail(join(dp, "distance_from_threshold"), "does not equal |p(poisonous) - threshold|");
        }
        if (certainty && *certainty != outcome.certainty) w.fail(join(dp, "certainty_level"), "inconsistent with distance");
        if (confidence && *confidence != outcome.confidence) {
          w.fail(join(dp, "confidence"), "does not equal the probability of the decided class");
        }
      }
    }
    if (const json* fa = w.object(*res, p, "feature_analysis")) {
      const auto fp = join(p, "feature_analysis");
      auto bias = w.decimal(*fa, fp, "bias");
      if (const json* list = w.array(*fa, fp, "concept_contributions")) {
        const auto lp = join(fp, "concept_contributions");
        Decimal sum;
        bool ok = true;
        std::optional<Decimal> previous;
        for (std::size_t i = 0; i < list->size(); ++i) {
          const auto ep = join(lp, std::to_string(i));
          const json& e = (*list)[i];
          if (!e.is_object()) {
            w.fail(ep, "expected object");
            ok = false;
            continue;
          }
          w.text(e, ep, "concept");
          auto c = w.decimal(e, ep, "contribution");
          if (!c) {
            ok = false;
            continue;
          }
          if (previous && c->abs() > previous->abs()) w.fail(ep, "contributions not sorted by magnitude");
          previous = c;
          sum += *c;
        }
        if (ok && bias && logit && sum + *bias != *logit) {
          w.fail(lp, "contributions plus bias do not sum to the logit");
        }
      }
    }
  }

  if (const json* pathway = w.array(doc, "", "decision_pathway")) {
    std::size_t next_required = 0;
    for (std::size_t i = 0; i < pathway->size(); ++i) {
      const auto sp = join("decision_pathway", std::to_string(i));
      const json& s = (*pathway)[i];
      if (!s.is_object()) {
        w.fail(sp, "expected object");
        continue;
      }
      auto name = w.text(s, sp, "step");
      w.digest(s, sp, "input_digest");
      w.digest(s, sp, "output_digest");
      if (name && next_required < kRequiredPathwaySteps.size() && *name == kRequiredPathwaySteps[next_required]) {
        ++next_required;
      }
    }
    if (pathway->size() < kMinimumPathwaySteps) {
      w.fail("decision_pathway", "needs at least 4 steps");
    } else if (next_required != kRequiredPathwaySteps.size()) {
      w.fail("decision_pathway", "missing one of decode-input, verify-model, encode, predict (in order)");
    }
  }

  if (const json* t = w.object(doc, "", "temporal_inference_data")) {
    w.count(*t, "temporal_inference_data", "duration_micros");
  }

  if (const json* env = w.object(doc, "", "runtime_environment")) {
    for (auto key : {"os", "cpu", "toolkit_version", "serving_system"}) w.text(*env, "runtime_environment", key);
  }
}

}  // namespace

std::string ValidationReport::summary() const {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += (v.path.empty() ? "(root)" : v.path) + ": " + v.message;
  }
  return out;
}

void to_json(nlohmann::json& j, const ValidationReport& r) {
  json list = json::array();
  for (const auto& v : r.violations) list.push_back({{"path", v.path}, {"message", v.message}});
  j = json{{"valid", r.valid()}, {"violations", list}};
}

Decimal exact_mean(std::span<const Decimal> values) {
  if (values.empty()) return Decimal{};
  internal::i128 sum = 0;
  for (const auto& v : values) sum += v.units();
  const auto n = static_cast<internal::i128>(values.size());
  const bool negative = sum < 0;
  const internal::i128 magnitude = negative ? -sum : sum;
  internal::i128 q = magnitude / n;
  const internal::i128 r = magnitude % n;
  if (2 * r > n || (2 * r == n && q % 2 == 1)) ++q;
  return Decimal::from_units(static_cast<std::int64_t>(negative ? -q : q));
}

std::optional<BomKind> detect_bom_kind(const json& doc) {
  if (!doc.is_object()) return std::nullopt;
  if (doc.contains("inference_identification") || doc.contains("inference_results")) return BomKind::kIbom;
  if (doc.contains("project_metadata") || doc.contains("data_summary") || doc.contains("performance_metrics")) {
    return BomKind::kTbom;
  }
  return std::nullopt;
}

ValidationReport validate_bom(const json& doc, BomKind kind) {
  ValidationReport report;
  Walker w(report);
  if (!doc.is_object()) {
    w.fail("", "document must be a JSON object");
    return report;
  }
  if (kind == BomKind::kTbom) validate_tbom(w, doc);
  else validate_ibom(w, doc);
  return report;
}

}  // namespace dbom
