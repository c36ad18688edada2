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

#ifndef DBOM_LOGISTIC_HPP_
#define DBOM_LOGISTIC_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dbom/dataset.hpp"
#include "dbom/decimal.hpp"

namespace dbom {

inline constexpr std::string_view kArchitectureTag = "linear-concept-head/logistic";
inline constexpr std::string_view kArtifactVersion = "1";
inline constexpr std::string_view kOptimizer = "full-batch gradient descent";

struct Hyperparameters {
  Decimal learning_rate = Decimal::from_units(100'000'000);  // 0.1
  std::uint64_t epochs = 300;
  Decimal l2_lambda = Decimal::from_units(100'000);  // 1e-4
  std::uint64_t seed = 42;
  Decimal threshold = Decimal::from_units(500'000'000);  // 0.5
  friend bool operator==(const Hyperparameters&, const Hyperparameters&) = default;
};

/// Classifier weights as stored on disk and pinned by digest in the TBOM.
struct ModelArtifact {
  std::string architecture_tag{kArchitectureTag};
  std::string version{kArtifactVersion};
  std::vector<Decimal> weights;
  Decimal bias;
  Decimal threshold = Decimal::from_units(500'000'000);
  EncodingMap encoding;
  friend bool operator==(const ModelArtifact&, const ModelArtifact&) = default;
};

void to_json(nlohmann::json& j, const ModelArtifact& m);
/// Throws Error(kFormat) when fields are missing, ill-typed, or break
/// |weights| = |features| or threshold in (0,1).
void from_json(const nlohmann::json& j, ModelArtifact& m);

struct LossAndGradient {
  double loss = 0.0;
  std::vector<double> grad_w;
  double grad_b = 0.0;
};

/// L(w, b) = (1/n) sum_i [log(1 + e^{z_i}) - y_i z_i] + (lambda/2) |w|^2,
/// z_i = w . x_i + b. The bias is not regularized.
LossAndGradient loss_and_gradient(const Matrix& x, std::span<const std::uint8_t> y, std::span<const double> w,
                                  double b, double lambda);

struct RawWeights {
  std::vector<double> w;
  double b = 0.0;
};

/// Zero-initialized full-batch gradient descent. Throws Error(kDivergence)
/// naming the epoch if the loss or a parameter stops being finite.
RawWeights fit_logistic(const Matrix& x, std::span<const std::uint8_t> y, const Hyperparameters& hp);

/// fit_logistic, then rounds every parameter to nine decimal places.
ModelArtifact train_logistic(const Matrix& x, std::span<const std::uint8_t> y, const Hyperparameters& hp,
                             EncodingMap encoding);

/// 1 / (1 + e^{-logit}) rounded to nine decimals.
Decimal sigmoid(Decimal logit);

/// Exact sum of w_j over active features plus bias. Entries of `x` must be
/// 0 or 1. Throws Error(kFormat) on a length mismatch.
Decimal model_logit(const ModelArtifact& model, std::span<const std::uint8_t> x);

/// p(poisonous) for each row of a 0/1 matrix, using the stored model.
std::vector<Decimal> predict_probabilities(const ModelArtifact& model, const Matrix& x);

}  // namespace dbom

#endif  // DBOM_LOGISTIC_HPP_
