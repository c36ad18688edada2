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

#include <benchmark/benchmark.h>

#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "dbom/canonical.hpp"
#include "dbom/dataset.hpp"
#include "dbom/digest.hpp"
#include "dbom/envelope.hpp"
#include "dbom/inference.hpp"
#include "dbom/key_authority.hpp"
#include "dbom/logistic.hpp"

namespace {

using nlohmann::json;

const dbom::EncodedDataset& encoded() {
  static const auto e = dbom::one_hot_encode(dbom::load_csv_dataset(DBOM_BENCH_DATASET));
  return e;
}

json wide_document(int n) {
  json doc = json::object();
  for (int i = 0; i < n; ++i) {
    doc["concept-" + std::to_string(n - i)] = {{"contribution", "0.123456789"}, {"rank", i}, {"tags", {"a", "b"}}};
  }
  return doc;
}

void BM_Canonicalize(benchmark::State& state) {
  const json doc = wide_document(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(dbom::canonicalize(doc));
}
BENCHMARK(BM_Canonicalize)->Arg(16)->Arg(128)->Arg(1024);

void BM_Sha256(benchmark::State& state) {
  const std::string data(static_cast<std::size_t>(state.range(0)), 'x');
  for (auto _ : state) benchmark::DoNotOptimize(dbom::Digest::of(data));
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Sha256)->Arg(1 << 10)->Arg(1 << 20);

struct Signer {
  dbom::Digest m = dbom::Digest::of("bench");
  dbom::KeyAuthority authority{{m.hex()}};
  std::pair<dbom::KeyHandle, dbom::KeyRecord> key = authority.issue_signing_key(m, "bench");
};

void BM_Sign(benchmark::State& state) {
  Signer s;
  const auto payload = dbom::canonicalize(wide_document(64));
  for (auto _ : state) benchmark::DoNotOptimize(s.authority.sign(payload, s.key.first));
}
BENCHMARK(BM_Sign);

void BM_Verify(benchmark::State& state) {
  Signer s;
  const auto env = s.authority.sign(dbom::canonicalize(wide_document(64)), s.key.first);
  for (auto _ : state) benchmark::DoNotOptimize(dbom::verify(env, s.authority));
}
BENCHMARK(BM_Verify);

void BM_Train(benchmark::State& state) {
  const auto& e = encoded();
  dbom::Hyperparameters hp;
  hp.epochs = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(dbom::fit_logistic(e.x, e.y, hp));
}
BENCHMARK(BM_Train)->Arg(10)->Arg(300)->Unit(benchmark::kMillisecond);

void BM_Predict(benchmark::State& state) {
  const auto& e = encoded();
  dbom::Hyperparameters hp;
  hp.epochs = 50;
  const auto model = dbom::train_logistic(e.x, e.y, hp, e.encoding);
  const auto data = dbom::load_csv_dataset(DBOM_BENCH_DATASET);
  dbom::FeatureMap row;
  for (std::size_t a = 0; a < data.attributes.size(); ++a) row[data.attributes[a]] = data.values[0][a];
  for (auto _ : state) benchmark::DoNotOptimize(dbom::predict(model, row));
}
BENCHMARK(BM_Predict);

}  // namespace

BENCHMARK_MAIN();
