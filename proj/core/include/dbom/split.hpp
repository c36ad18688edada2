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

#ifndef DBOM_SPLIT_HPP_
#define DBOM_SPLIT_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "dbom/decimal.hpp"

namespace dbom {

/// splitmix64; chosen because every language can reproduce it bit for bit.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// for i = n-1 .. 1: j = next() % (i + 1); swap(v[i], v[j])
void fisher_yates(std::span<std::uint64_t> values, SplitMix64& rng);

struct HoldoutSplit {
  std::vector<std::uint64_t> train;  // ascending
  std::vector<std::uint64_t> test;   // ascending
};

/// Per class (edible, then poisonous) shuffles that class's indices with one
/// shared generator and sends the first round-half-even(n_c * fraction) to
/// test. Throws Error(kSplit) if fraction is outside (0,1), a class is absent
/// or a class would keep no training samples.
HoldoutSplit stratified_holdout_split(std::span<const std::uint8_t> labels, Decimal test_fraction, std::uint64_t seed);

/// Shuffles each class's members of `train` and deals them round robin onto
/// k folds, continuing the dealing position from one class into the next.
/// Folds come back sorted. Throws Error(kSplit) for k < 2 or a class with
/// fewer than k members.
std::vector<std::vector<std::uint64_t>> stratified_kfold(std::span<const std::uint64_t> train,
                                                         std::span<const std::uint8_t> labels, std::uint64_t k,
                                                         std::uint64_t seed);

/// Everything in `train` not in `fold`, ascending; both inputs ascending.
std::vector<std::uint64_t> complement_of_fold(std::span<const std::uint64_t> train,
                                              std::span<const std::uint64_t> fold);

}  // namespace dbom

#endif  // DBOM_SPLIT_HPP_
