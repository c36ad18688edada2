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

#include "dbom/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "dbom/error.hpp"

namespace dbom {

using nlohmann::json;

namespace {

std::vector<std::string> split_fields(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    out.emplace_back(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t");
  if (b == s.npos) return {};
  auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::uint64_t Dataset::count(std::uint8_t label) const {
  return static_cast<std::uint64_t>(std::count(labels.begin(), labels.end(), label));
}

Dataset parse_csv_dataset(std::string_view bytes, std::string name) {
  Dataset ds;
  ds.name = std::move(name);
  ds.source_digest = Digest::of(bytes);

  std::size_t pos = 0;
  std::size_t lineno = 0;
  bool have_header = false;
  while (pos < bytes.size()) {
    auto nl = bytes.find('\n', pos);
    std::string_view line = bytes.substr(pos, nl == bytes.npos ? bytes.npos : nl - pos);
    pos = nl == bytes.npos ? bytes.size() : nl + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;

    auto fields = split_fields(line);
    for (auto& f : fields) f = trim(f);
    if (!have_header) {
      if (fields.size() < 2) throw Error(ErrorCode::kLoad, "line " + std::to_string(lineno) + ": header needs a class column and at least one attribute");
      ds.attributes.assign(fields.begin() + 1, fields.end());
      std::vector<std::string> sorted = ds.attributes;
      std::sort(sorted.begin(), sorted.end());
      for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (sorted[i].empty() || sorted[i].find('=') != std::string::npos || (i > 0 && sorted[i] == sorted[i - 1])) {
          throw Error(ErrorCode::kLoad, "line " + std::to_string(lineno) + ": attribute names must be unique, non-empty and free of '='");
        }
      }
      have_header = true;
      continue;
    }
    if (fields.size() != ds.attributes.size() + 1) {
      throw Error(ErrorCode::kLoad, "line " + std::to_string(lineno) + ": expected " +
                                        std::to_string(ds.attributes.size() + 1) + " fields, found " +
                                        std::to_string(fields.size()));
    }
    if (fields[0] == "e") {
      ds.labels.push_back(kLabelEdible);
    } else if (fields[0] == "p") {
      ds.labels.push_back(kLabelPoisonous);
    } else {
      throw Error(ErrorCode::kLoad, "line " + std::to_string(lineno) + ": unknown class symbol '" + fields[0] + "'");
    }
    ds.values.emplace_back(std::make_move_iterator(fields.begin() + 1), std::make_move_iterator(fields.end()));
  }
  if (!have_header) throw Error(ErrorCode::kLoad, "empty dataset file");
  if (ds.labels.empty()) throw Error(ErrorCode::kLoad, "dataset has a header but no rows");
  return ds;
}

Dataset load_csv_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kLoad, "cannot open dataset " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv_dataset(ss.str(), path.stem().string());
}

EncodingMap::EncodingMap(std::vector<Feature> features) : features_(std::move(features)) {
  std::sort(features_.begin(), features_.end());
  features_.erase(std::unique(features_.begin(), features_.end()), features_.end());
  for (std::size_t i = 0; i < features_.size(); ++i) index_[{features_[i].attribute, features_[i].value}] = i;
}

EncodingMap EncodingMap::from_dataset(const Dataset& dataset) {
  std::vector<Feature> features;
  for (const auto& row : dataset.values) {
    for (std::size_t a = 0; a < row.size(); ++a) features.push_back({dataset.attributes[a], row[a]});
  }
  return EncodingMap(std::move(features));
}

std::optional<std::size_t> EncodingMap::find(std::string_view attribute, std::string_view value) const {
  auto it = index_.find(std::pair<std::string, std::string>(attribute, value));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> EncodingMap::find_concept(std::string_view concept_name) const {
  // Attribute names never contain '=', values may.
  auto eq = concept_name.find('=');
  if (eq == concept_name.npos) return std::nullopt;
  return find(concept_name.substr(0, eq), concept_name.substr(eq + 1));
}

std::vector<std::string> EncodingMap::attributes() const {
  std::vector<std::string> out;
  for (const auto& f : features_) {
    if (out.empty() || out.back() != f.attribute) out.push_back(f.attribute);
  }
  return out;
}

std::vector<std::string> EncodingMap::concept_names() const {
  std::vector<std::string> out;
  out.reserve(features_.size());
  for (const auto& f : features_) out.push_back(f.concept_name());
  return out;
}

void to_json(json& j, const EncodingMap& m) {
  json features = json::array();
  for (const auto& f : m.features()) features.push_back({{"attribute", f.attribute}, {"value", f.value}});
  j = {{"features", std::move(features)}};
}

void from_json(const json& j, EncodingMap& m) {
  std::vector<Feature> features;
  for (const auto& f : j.at("features")) {
    features.push_back({f.at("attribute").get<std::string>(), f.at("value").get<std::string>()});
  }
  std::size_t n = features.size();
  EncodingMap built(features);
  if (built.size() != n || built.features() != features) {
    throw Error(ErrorCode::kFormat, "encoding features must be sorted and unique");
  }
  m = std::move(built);
}

Matrix Matrix::select_rows(std::span<const std::uint64_t> indices) const {
  Matrix out(indices.size(), cols);
  for (std::size_t r = 0; r < indices.size(); ++r) {
    std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(indices[r] * cols), cols,
                out.data.begin() + static_cast<std::ptrdiff_t>(r * cols));
  }
  return out;
}

EncodedDataset one_hot_encode(const Dataset& dataset) {
  EncodedDataset out;
  out.encoding = EncodingMap::from_dataset(dataset);
  out.y = dataset.labels;
  out.x = Matrix(dataset.size(), out.encoding.size());
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    for (std::size_t a = 0; a < dataset.attributes.size(); ++a) {
      out.x.at(i, *out.encoding.find(dataset.attributes[a], dataset.values[i][a])) = 1.0;
    }
  }
  return out;
}

}  // namespace dbom
