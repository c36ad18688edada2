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

#include "dbom/split.hpp"

#include <algorithm>
#include <array>
#include <string>

#include "dbom/error.hpp"
#include "int128.hpp"

namespace dbom {

namespace {

std::array<std::vector<std::uint64_t>, 2> by_class(std::span<const std::uint64_t> indices,
                                                   std::span<const std::uint8_t> labels) {
  std::array<std::vector<std::uint64_t>, 2> out;
  for (auto i : indices) {
    if (i >= labels.size()) throw Error(ErrorCode::kSplit, "index " + std::to_string(i) + " out of range");
    auto l = labels[i];
    if (l > 1) throw Error(ErrorCode::kSplit, "label at index " + std::to_string(i) + " is not 0/1");
    out[l].push_back(i);
  }
  return out;
}

// round-half-even(n * units / 1e9), exact.
std::uint64_t scaled_count(std::uint64_t n, Decimal fraction) {
  internal::u128 num = static_cast<internal::u128>(n) * static_cast<std::uint64_t>(fraction.units());
  const internal::u128 den = Decimal::kScale;
  auto q = num / den;
  auto r = num % den;
  if (2 * r > den || (2 * r == den && (q & 1))) ++q;
  return static_cast<std::uint64_t>(q);
}

}  // namespace

void fisher_yates(std::span<std::uint64_t> values, SplitMix64& rng) {
  for (std::size_t i = values.size(); i-- > 1;) {
    std::size_t j = static_cast<std::size_t>(rng.next() % (i + 1));
    std::swap(values[i], values[j]);
  }
}

HoldoutSplit stratified_holdout_split(std::span<const std::uint8_t> labels, Decimal test_fraction,
                                      std::uint64_t seed) {
  if (test_fraction <= Decimal() || test_fraction >= Decimal::from_integer(1)) {
    throw Error(ErrorCode::kSplit, "test fraction must lie in (0,1), got " + test_fraction.to_string());
  }
  std::vector<std::uint64_t> all(labels.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  auto classes = by_class(all, labels);

  SplitMix64 rng(seed);
  HoldoutSplit out;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    auto& members = classes[c];
    if (members.empty()) throw Error(ErrorCode::kSplit, "class " + std::to_string(c) + " has no samples");
    fisher_yates(members, rng);
    std::uint64_t n_test = scaled_count(members.size(), test_fraction);
    if (n_test >= members.size()) {
      throw Error(ErrorCode::kSplit, "class " + std::to_string(c) + " would keep no training samples");
    }
    out.test.insert(out.test.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(n_test));
    out.train.insert(out.train.end(), members.begin() + static_cast<std::ptrdiff_t>(n_test), members.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::vector<std::vector<std::uint64_t>> stratified_kfold(std::span<const std::uint64_t> train,
                                                         std::span<const std::uint8_t> labels, std::uint64_t k,
                                                         std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::kSplit, "k must be at least 2");
  auto classes = by_class(train, labels);
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (classes[c].size() < k) {
      throw Error(ErrorCode::kSplit, "class " + std::to_string(c) + " has " + std::to_string(classes[c].size()) +
                                         " training samples, fewer than k=" + std::to_string(k));
    }
  }
  SplitMix64 rng(seed);
  std::vector<std::vector<std::uint64_t>> folds(k);
  std::uint64_t position = 0;
  for (auto& members : classes) {
    fisher_yates(members, rng);
    for (auto idx : members) folds[position++ % k].push_back(idx);
  }
  for (auto& f : folds) std::sort(f.begin(), f.end());
  return folds;
}

std::vector<std::uint64_t> complement_of_fold(std::span<const std::uint64_t> train,
                                              std::span<const std::uint64_t> fold) {
  std::vector<std::uint64_t> out;
  out.reserve(train.size() - std::min(train.size(), fold.size()));
  std::set_difference(train.begin(), train.end(), fold.begin(), fold.end(), std::back_inserter(out));
  return out;
}

}  // namespace dbom
