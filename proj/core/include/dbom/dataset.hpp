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

#ifndef DBOM_DATASET_HPP_
#define DBOM_DATASET_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "dbom/digest.hpp"

namespace dbom {

inline constexpr std::uint8_t kLabelEdible = 0;
inline constexpr std::uint8_t kLabelPoisonous = 1;

/// Categorical table whose first CSV column is the class symbol ("e"/"p").
struct Dataset {
  std::string name;
  std::vector<std::string> attributes;
  std::vector<std::uint8_t> labels;              // 1 = poisonous
  std::vector<std::vector<std::string>> values;  // one row per sample, |attributes| wide
  Digest source_digest;                          // over the raw file bytes

  std::size_t size() const { return labels.size(); }
  std::uint64_t count(std::uint8_t label) const;
};

/// Throws Error(kLoad) naming the 1-based line for ragged rows, unknown class
/// symbols or an empty file. "?" is an ordinary value.
Dataset parse_csv_dataset(std::string_view bytes, std::string name);
Dataset load_csv_dataset(const std::filesystem::path& path);

struct Feature {
  std::string attribute;
  std::string value;
  std::string concept_name() const { return attribute + "=" + value; }
  friend auto operator<=>(const Feature&, const Feature&) = default;
};

/// One-hot layout: features sorted by (attribute, value), positions 0..n-1.
class EncodingMap {
 public:
  EncodingMap() = default;
  /// Sorts and deduplicates `features`.
  explicit EncodingMap(std::vector<Feature> features);

  static EncodingMap from_dataset(const Dataset& dataset);

  const std::vector<Feature>& features() const { return features_; }
  std::size_t size() const { return features_.size(); }
  std::optional<std::size_t> find(std::string_view attribute, std::string_view value) const;
  std::optional<std::size_t> find_concept(std::string_view concept_name) const;
  /// Distinct attribute names in sorted order.
  std::vector<std::string> attributes() const;
  std::vector<std::string> concept_names() const;

  friend bool operator==(const EncodingMap& a, const EncodingMap& b) { return a.features_ == b.features_; }

 private:
  std::vector<Feature> features_;
  std::map<std::pair<std::string, std::string>, std::size_t, std::less<>> index_;
};

void to_json(nlohmann::json& j, const EncodingMap& m);
void from_json(const nlohmann::json& j, EncodingMap& m);

/// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double& at(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * cols + j]; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }

  /// Rows selected by `indices`, in the given order.
  Matrix select_rows(std::span<const std::uint64_t> indices) const;
};

struct EncodedDataset {
  Matrix x;
  std::vector<std::uint8_t> y;
  EncodingMap encoding;
};

/// Entry (i, j) is 1 iff row i carries feature j. The map is built from the
/// values observed in `dataset` only.
EncodedDataset one_hot_encode(const Dataset& dataset);

}  // namespace dbom

#endif  // DBOM_DATASET_HPP_
