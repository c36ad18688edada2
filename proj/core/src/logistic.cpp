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

#include "dbom/logistic.hpp"

#include <cmath>
#include <string>

#include "dbom/error.hpp"

namespace dbom {

using nlohmann::json;

namespace {

Decimal decimal_member(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end() || !it->is_string()) {
    throw Error(ErrorCode::kFormat, std::string("model artifact: '") + name + "' must be decimal text");
  }
  auto d = Decimal::parse(it->get_ref<const std::string&>());
  if (!d) throw Error(ErrorCode::kFormat, std::string("model artifact: '") + name + "' is not canonical decimal text");
  return *d;
}

// log(1 + e^z) without overflow.
double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double logistic(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

void to_json(json& j, const ModelArtifact& m) {
  json weights = json::array();
  for (const auto& w : m.weights) weights.push_back(w.to_string());
  j = {{"architecture_tag", m.architecture_tag},
       {"version", m.version},
       {"weights", std::move(weights)},
       {"bias", m.bias.to_string()},
       {"threshold", m.threshold.to_string()},
       {"encoding", m.encoding}};
}

void from_json(const json& j, ModelArtifact& m) {
  if (!j.is_object()) throw Error(ErrorCode::kFormat, "model artifact: not a JSON object");
  try {
    m.architecture_tag = j.at("architecture_tag").get<std::string>();
    m.version = j.at("version").get<std::string>();
    m.encoding = j.at("encoding").get<EncodingMap>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("model artifact: ") + e.what());
  }
  m.bias = decimal_member(j, "bias");
  m.threshold = decimal_member(j, "threshold");
  auto it = j.find("weights");
  if (it == j.end() || !it->is_array()) throw Error(ErrorCode::kFormat, "model artifact: 'weights' must be a list");
  m.weights.clear();
  for (const auto& w : *it) {
    auto d = w.is_string() ? Decimal::parse(w.get_ref<const std::string&>()) : std::nullopt;
    if (!d) throw Error(ErrorCode::kFormat, "model artifact: weights must be canonical decimal text");
    m.weights.push_back(*d);
  }
  if (m.weights.size() != m.encoding.size()) {
    throw Error(ErrorCode::kFormat, "model artifact: " + std::to_string(m.weights.size()) + " weights for " +
                                        std::to_string(m.encoding.size()) + " features");
  }
  if (m.threshold <= Decimal() || m.threshold >= Decimal::from_integer(1)) {
    throw Error(ErrorCode::kFormat, "model artifact: threshold must lie in (0,1)");
  }
}

LossAndGradient loss_and_gradient(const Matrix& x, std::span<const std::uint8_t> y, std::span<const double> w,
                                  double b, double lambda) {
  LossAndGradient out;
  out.grad_w.assign(x.cols, 0.0);
  const double n = static_cast<double>(x.rows);
  double reg = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    auto row = x.row(i);
    double z = b;
    for (std::size_t j = 0; j < x.cols; ++j) z += w[j] * row[j];
    out.loss += softplus(z) - y[i] * z;
    double r = logistic(z) - y[i];
    for (std::size_t j = 0; j < x.cols; ++j) out.grad_w[j] += r * row[j];
    out.grad_b += r;
  }
  out.loss /= n;
  out.grad_b /= n;
  for (std::size_t j = 0; j < x.cols; ++j) {
    out.grad_w[j] = out.grad_w[j] / n + lambda * w[j];
    reg += w[j] * w[j];
  }
  out.loss += 0.5 * lambda * reg;
  return out;
}

RawWeights fit_logistic(const Matrix& x, std::span<const std::uint8_t> y, const Hyperparameters& hp) {
  if (x.rows == 0 || x.rows != y.size()) {
    throw Error(ErrorCode::kFormat, "training data must be non-empty with one label per row");
  }
  RawWeights p;
  p.w.assign(x.cols, 0.0);
  const double lr = hp.learning_rate.to_double();
  const double lambda = hp.l2_lambda.to_double();
  for (std::uint64_t epoch = 1; epoch <= hp.epochs; ++epoch) {
    auto g = loss_and_gradient(x, y, p.w, p.b, lambda);
    if (!std::isfinite(g.loss)) {
      throw Error(ErrorCode::kDivergence, "loss is not finite at epoch " + std::to_string(epoch));
    }
    for (std::size_t j = 0; j < x.cols; ++j) p.w[j] -= lr * g.grad_w[j];
    p.b -= lr * g.grad_b;
    bool finite = std::isfinite(p.b) && std::abs(p.b) < 9e9;
    for (double v : p.w) finite = finite && std::isfinite(v) && std::abs(v) < 9e9;
    if (!finite) throw Error(ErrorCode::kDivergence, "parameters diverged at epoch " + std::to_string(epoch));
  }
  return p;
}

ModelArtifact train_logistic(const Matrix& x, std::span<const std::uint8_t> y, const Hyperparameters& hp,
                             EncodingMap encoding) {
  if (encoding.size() != x.cols) {
    throw Error(ErrorCode::kFormat, "encoding has " + std::to_string(encoding.size()) + " features, matrix has " +
                                        std::to_string(x.cols) + " columns");
  }
  auto raw = fit_logistic(x, y, hp);
  ModelArtifact m;
  m.weights.reserve(raw.w.size());
  for (double v : raw.w) m.weights.push_back(Decimal::from_double(v));
  m.bias = Decimal::from_double(raw.b);
  m.threshold = hp.threshold;
  m.encoding = std::move(encoding);
  return m;
}

Decimal sigmoid(Decimal logit) { return Decimal::from_double(logistic(logit.to_double())); }

Decimal model_logit(const ModelArtifact& model, std::span<const std::uint8_t> x) {
  if (x.size() != model.weights.size()) {
    throw Error(ErrorCode::kFormat, "encoded vector has " + std::to_string(x.size()) + " entries, model expects " +
                                        std::to_string(model.weights.size()));
  }
  Decimal z = model.bias;
  for (std::size_t j = 0; j < x.size(); ++j) {
    if (x[j] > 1) throw Error(ErrorCode::kFormat, "encoded vector entries must be 0 or 1");
    if (x[j]) z += model.weights[j];
  }
  return z;
}

std::vector<Decimal> predict_probabilities(const ModelArtifact& model, const Matrix& x) {
  std::vector<Decimal> out;
  out.reserve(x.rows);
  std::vector<std::uint8_t> row(x.cols);
  for (std::size_t i = 0; i < x.rows; ++i) {
    auto r = x.row(i);
    for (std::size_t j = 0; j < x.cols; ++j) row[j] = r[j] != 0.0 ? 1 : 0;
    out.push_back(sigmoid(model_logit(model, row)));
  }
  return out;
}

}  // namespace dbom
