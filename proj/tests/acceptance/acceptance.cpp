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

// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any
// FAIL. Tolerances are fixed here and must not be loosened.

#include <openssl/evp.h>
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dbom/bom.hpp"
#include "dbom/canonical.hpp"
#include "dbom/compliance.hpp"
#include "dbom/dataset.hpp"
#include "dbom/digest.hpp"
#include "dbom/encoding.hpp"
#include "dbom/envelope.hpp"
#include "dbom/inference.hpp"
#include "dbom/integrity.hpp"
#include "dbom/key_authority.hpp"
#include "dbom/logistic.hpp"
#include "dbom/split.hpp"
#include "dbom/vigilance.hpp"
#include "rule_oracle.hpp"
#include "test_support.hpp"
#include "vigilance_script.hpp"

namespace {

using nlohmann::json;
using namespace dbom;
namespace fs = std::filesystem;

constexpr double kMaxTrainSeconds = 60.0;
constexpr double kMinAccuracy = 0.95;
constexpr double kMaxGradientError = 1e-6;
constexpr int kTamperMutations = 1000;
constexpr int kRoundTrips = 1000;
constexpr int kOraclePairs = 500;
constexpr int kStratificationSeeds = 100;
constexpr int kFiniteDiffInstances = 100;
constexpr std::size_t kInferRows = 12;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Proc {
  int code = -1;
  std::string out;
};

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

Proc cli(const std::vector<std::string>& args) {
  std::string cmd = quote(dbom::testing::kCliPath.string());
  for (const auto& a : args) cmd += " " + quote(a);
  cmd += " 2>&1";
  Proc p;
  FILE* f = popen(cmd.c_str(), "r");
  if (!f) return p;
  char buf[4096];
  while (auto n = fread(buf, 1, sizeof buf, f)) p.out.append(buf, n);
  const int status = pclose(f);
  p.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return p;
}

Proc must(const std::vector<std::string>& args) {
  auto p = cli(args);
  if (p.code != 0) {
    std::string joined;
    for (const auto& a : args) joined += a + " ";
    throw std::runtime_error("dbom " + joined + "exited " + std::to_string(p.code) + ": " + p.out);
  }
  return p;
}

// Shared state built by the end-to-end criterion and reused by later ones.
struct World {
  dbom::testing::TempDir dir;
  std::string cas;
  fs::path tbom, model, tbom_other;
  std::vector<fs::path> iboms;
  double train_seconds = 0;

  fs::path registry() const { return fs::path(cas) / "registry.jsonl"; }
};

std::string measurement_of(const std::vector<std::string>& args) {
  auto p = must(args);
  return p.out.substr(0, 64);
}

fs::path train_in(World& w, const std::string& sub, std::uint64_t seed, double* seconds = nullptr) {
  const auto root = w.dir / sub;
  fs::create_directories(root);
  const auto cfg = (root / "train.json").string();
  dbom::testing::write_file(cfg, dbom::testing::training_config(dbom::testing::kDatasetPath, "out", seed));
  must({"cas", "allow", measurement_of({"cas", "measure", "--config", cfg}), "--cas", w.cas});
  const auto t0 = std::chrono::steady_clock::now();
  must({"train", cfg, "--cas", w.cas});
  if (seconds) *seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return root / "out";
}

Outcome end_to_end(World& w) {
  w.cas = (w.dir / "cas").string();
  must({"cas", "init", "--cas", w.cas});
  const auto out = train_in(w, "run-a", 42, &w.train_seconds);
  w.tbom = out / "tbom.dbom.json";
  w.model = out / "model.json";

  const auto verify = cli({"--json", "verify", w.tbom.string(), "--kind", "tbom", "--cas", w.cas});
  const bool integrity = verify.code == 0 && json::parse(verify.out).value("signature_valid", false) &&
                         json::parse(verify.out).value("schema_valid", false);

  const auto rules = w.dir / "rules.txt";
  dbom::testing::write_file(rules, "performance_metrics.final_test.accuracy >= 0.95\n");
  const auto comply = cli({"comply", w.tbom.string(), "--rules", rules.string(), "--cas", w.cas});

  KeyRegistryFile registry(w.registry());
  const auto report = integrity_check(dbom::testing::read_file(w.tbom), registry, BomKind::kTbom);
  const Tbom tbom = parse_json(report.payload).get<Tbom>();
  const double accuracy = tbom.performance_metrics.final_test.accuracy.to_double();

  std::ostringstream d;
  d << "train " << w.train_seconds << " s (limit " << kMaxTrainSeconds << "), integrity "
    << (integrity ? "ok" : "FAILED") << ", accuracy " << tbom.performance_metrics.final_test.accuracy.to_string()
    << ", comply exit " << comply.code;
  return {w.train_seconds < kMaxTrainSeconds && integrity && comply.code == 0 && accuracy >= kMinAccuracy, d.str()};
}

Outcome determinism(World& w) {
  const auto again = train_in(w, "run-b", 42);
  KeyRegistryFile registry(w.registry());
  const auto a = integrity_check(dbom::testing::read_file(w.tbom), registry, BomKind::kTbom);
  const auto b = integrity_check(dbom::testing::read_file(again / "tbom.dbom.json"), registry, BomKind::kTbom);
  const auto ma = Digest::of(dbom::testing::read_file(w.model));
  const auto mb = Digest::of(dbom::testing::read_file(again / "model.json"));
  const bool same_payload = a.pass() && b.pass() && a.payload == b.payload;
  return {same_payload && ma == mb, std::string("payload ") + (same_payload ? "identical" : "DIFFERS") +
                                        ", model digest " + ma.hex().substr(0, 16) + " vs " + mb.hex().substr(0, 16)};
}

// Also emits the IBOMs used by the chain, tamper and numerical criteria.
Outcome chain_suite(World& w) {
  w.tbom_other = train_in(w, "run-seed43", 43) / "tbom.dbom.json";
  must({"cas", "allow", measurement_of({"cas", "measure", "--model", w.model.string(), "--tbom", w.tbom.string()}),
        "--cas", w.cas});
  const auto data = load_csv_dataset(dbom::testing::kDatasetPath);
  const std::size_t stride = data.size() / kInferRows;
  int chained = 0, mismatched = 0;
  for (std::size_t k = 0; k < kInferRows; ++k) {
    const auto& row = data.values[k * stride];
    json features = json::object();
    for (std::size_t a = 0; a < data.attributes.size(); ++a) features[data.attributes[a]] = row[a];
    const auto input = w.dir / ("input-" + std::to_string(k) + ".json");
    const auto ibom = w.dir / ("ibom-" + std::to_string(k) + ".dbom.json");
    dbom::testing::write_file(input, features.dump());
    must({"infer", "--model", w.model.string(), "--tbom", w.tbom.string(), "--input", input.string(), "--cas", w.cas,
          "--out", ibom.string()});
    w.iboms.push_back(ibom);

    const auto own = cli({"--json", "chain", ibom.string(), w.tbom.string(), "--cas", w.cas});
    if (own.code == 0 && json::parse(own.out).value("verdict", "") == "pass") ++chained;
    const auto other = cli({"--json", "chain", ibom.string(), w.tbom_other.string(), "--cas", w.cas});
    if (other.code == 1 && json::parse(other.out).value("verdict", "") == "link_mismatch") ++mismatched;
  }
  const int n = static_cast<int>(kInferRows);
  return {chained == n && mismatched == n, std::to_string(chained) + "/" + std::to_string(n) + " chain to own TBOM, " +
                                               std::to_string(mismatched) + "/" + std::to_string(n) +
                                               " link_mismatch against seed-43 TBOM"};
}

Outcome tamper_suite(World& w) {
  KeyRegistryFile registry(w.registry());
  const std::string tbom_bytes = dbom::testing::read_file(w.tbom);
  const std::string model_bytes = dbom::testing::read_file(w.model);
  const auto tr = integrity_check(tbom_bytes, registry, BomKind::kTbom);
  const Tbom tbom = parse_json(tr.payload).get<Tbom>();
  std::vector<std::string> ibom_bytes;
  for (const auto& p : w.iboms) ibom_bytes.push_back(dbom::testing::read_file(p));
  if (!tr.pass() || ibom_bytes.empty()) return {false, "fixtures missing"};

  std::mt19937_64 rng(0xD00D);
  int counts[3] = {0, 0, 0};
  int false_passes = 0;
  for (int i = 0; i < kTamperMutations; ++i) {
    const int target = i % 3;
    std::string bytes = target == 0 ? tbom_bytes : target == 1 ? ibom_bytes[rng() % ibom_bytes.size()] : model_bytes;
    const auto pos = rng() % bytes.size();
    bytes[pos] = static_cast<char>(static_cast<unsigned char>(bytes[pos]) ^ static_cast<unsigned char>(1 + rng() % 255));
    bool passed = false;
    if (target == 2) {
      try {
        verify_model_against_tbom(bytes, tbom);
        passed = true;
      } catch (const std::exception&) {
      }
    } else {
      passed = integrity_check(bytes, registry, target == 0 ? BomKind::kTbom : BomKind::kIbom).pass();
    }
    ++counts[target];
    if (passed) ++false_passes;
  }
  return {false_passes == 0, std::to_string(kTamperMutations) + " mutations (tbom " + std::to_string(counts[0]) +
                                 ", ibom " + std::to_string(counts[1]) + ", model " + std::to_string(counts[2]) +
                                 "), false passes " + std::to_string(false_passes)};
}

bool openssl_verify(const std::string& pk, const std::string& msg, const std::string& sig) {
  EVP_PKEY* key = EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr,
                                              reinterpret_cast<const unsigned char*>(pk.data()), pk.size());
  if (!key) return false;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  bool ok = EVP_DigestVerifyInit(ctx, nullptr, nullptr, nullptr, key) == 1 &&
            EVP_DigestVerify(ctx, reinterpret_cast<const unsigned char*>(sig.data()), sig.size(),
                             reinterpret_cast<const unsigned char*>(msg.data()), msg.size()) == 1;
  EVP_MD_CTX_free(ctx);
  EVP_PKEY_free(key);
  return ok;
}

// Payloads must be UTF-8; mixes 1- to 4-byte sequences.
std::string random_utf8(std::mt19937_64& rng, std::size_t code_points) {
  std::string out;
  for (std::size_t i = 0; i < code_points; ++i) {
    std::uint32_t cp = 0;
    switch (rng() % 4) {
      case 0: cp = rng() % 0x80; break;
      case 1: cp = 0x80 + rng() % (0x800 - 0x80); break;
      case 2: cp = 0x800 + rng() % (0x10000 - 0x800); break;
      default: cp = 0x10000 + rng() % (0x110000 - 0x10000); break;
    }
    if (cp >= 0xD800 && cp <= 0xDFFF) cp = 0xFFFD;
    if (cp < 0x80) {
      out += static_cast<char>(cp);
    } else if (cp < 0x800) {
      out += static_cast<char>(0xC0 | (cp >> 6));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
      out += static_cast<char>(0xE0 | (cp >> 12));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
      out += static_cast<char>(0xF0 | (cp >> 18));
      out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
      out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
      out += static_cast<char>(0x80 | (cp & 0x3F));
    }
  }
  return out;
}

Outcome crypto_vectors() {
  const bool sha = Digest::of("").hex() == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855" &&
                   Digest::of("abc").hex() == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad";
  const bool pae = pae_encode("t", "p") == "DSSEv1 1 t 1 p" &&
                   pae_encode(kDbomPayloadType, "{}") == "DSSEv1 25 application/vnd.dbom+json 2 {}" &&
                   pae_encode(kDbomPayloadType, "") == "DSSEv1 25 application/vnd.dbom+json 0 ";

  const Digest m = Digest::of("acceptance");
  KeyAuthority authority({m.hex()});
  const auto [handle, record] = authority.issue_signing_key(m, "acceptance");
  const auto pk = *base64_decode(record.verifying_key);
  std::mt19937_64 rng(88);
  int ok = 0;
  for (int i = 0; i < kRoundTrips; ++i) {
    const auto payload = random_utf8(rng, rng() % 256);
    const auto env = parse_envelope(serialize_envelope(authority.sign(payload, handle)));
    try {
      const auto v = verify(env, authority);
      if (v.payload == payload &&
          openssl_verify(pk, pae_encode(kDbomPayloadType, payload), *base64_decode(env.signatures[0].sig))) {
        ++ok;
      }
    } catch (const std::exception&) {
    }
  }
  return {sha && pae && ok == kRoundTrips, std::string("sha256 vectors ") + (sha ? "ok" : "WRONG") + ", pae " +
                                               (pae ? "ok" : "WRONG") + ", round trips " + std::to_string(ok) + "/" +
                                               std::to_string(kRoundTrips) + " (independently verified)"};
}

Outcome numerical(const World& w) {
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int instance = 0; instance < kFiniteDiffInstances; ++instance) {
    const std::size_t n = 2 + rng() % 12, d = 1 + rng() % 8;
    Matrix x(n, d);
    std::vector<std::uint8_t> y(n);
    for (auto& v : x.data) v = (rng() % 3 == 0) ? 0.0 : u(rng) * 2.0;
    for (auto& l : y) l = static_cast<std::uint8_t>(rng() & 1);
    std::vector<double> wv(d);
    for (auto& v : wv) v = u(rng);
    const double b = u(rng);
    const double lambda = (rng() % 2 == 0) ? 0.0 : 0.01 * static_cast<double>(1 + rng() % 10);
    const auto g = loss_and_gradient(x, y, wv, b, lambda);
    const double h = 1e-5;
    auto loss = [&](const std::vector<double>& ww, double bb) { return loss_and_gradient(x, y, ww, bb, lambda).loss; };
    for (std::size_t j = 0; j < d; ++j) {
      auto wp = wv, wm = wv;
      wp[j] += h;
      wm[j] -= h;
      worst = std::max(worst, std::abs((loss(wp, b) - loss(wm, b)) / (2 * h) - g.grad_w[j]));
    }
    worst = std::max(worst, std::abs((loss(wv, b + h) - loss(wv, b - h)) / (2 * h) - g.grad_b));
  }

  KeyRegistryFile registry(w.registry());
  std::size_t exact = 0;
  for (const auto& p : w.iboms) {
    const auto r = integrity_check(dbom::testing::read_file(p), registry, BomKind::kIbom);
    if (!r.pass()) continue;
    const Ibom ibom = parse_json(r.payload).get<Ibom>();
    Decimal sum = ibom.feature_analysis.bias;
    for (const auto& c : ibom.feature_analysis.concept_contributions) sum += c.contribution;
    if (sum == ibom.prediction.logit) ++exact;
  }
  std::ostringstream d;
  d << "max |fd - grad| " << worst << " over " << kFiniteDiffInstances << " instances (limit " << kMaxGradientError
    << "), contribution sum exact on " << exact << "/" << w.iboms.size() << " IBOMs";
  return {worst <= kMaxGradientError && !w.iboms.empty() && exact == w.iboms.size(), d.str()};
}

// |pos/|fold| - P/|train|| <= 1/|fold|, in integers.
bool fold_ratio_ok(std::uint64_t pos, std::uint64_t fold, std::uint64_t train_pos, std::uint64_t train) {
  const auto lhs = static_cast<std::int64_t>(pos * train) - static_cast<std::int64_t>(train_pos * fold);
  return static_cast<std::uint64_t>(std::llabs(lhs)) <= train;
}

Outcome stratification() {
  const auto data = load_csv_dataset(dbom::testing::kDatasetPath);
  std::mt19937_64 rng(4242);
  int good = 0;
  std::string first_bad;
  for (int s = 0; s < kStratificationSeeds; ++s) {
    const std::uint64_t seed = rng();
    // Alternate between the real labels and synthetic label vectors of varied balance and fold count.
    std::vector<std::uint8_t> labels = data.labels;
    std::uint64_t k = 5;
    if (s % 2 == 1) {
      labels.assign(40 + rng() % 600, 0);
      const auto p = 10 + rng() % 80;
      for (auto& l : labels) l = (rng() % 100) < p ? 1 : 0;
      for (std::size_t i = 0; i < 12; ++i) labels[i] = static_cast<std::uint8_t>(i % 2);
      k = 2 + rng() % 9;
    }
    const auto split = stratified_holdout_split(labels, Decimal::from_units(200'000'000), seed);
    const auto folds = stratified_kfold(split.train, labels, k, seed);
    std::vector<std::uint64_t> all;
    for (const auto& f : folds) all.insert(all.end(), f.begin(), f.end());
    std::sort(all.begin(), all.end());
    bool ok = folds.size() == k && all == split.train;
    std::uint64_t train_pos = 0;
    for (auto i : split.train) train_pos += labels[i];
    for (const auto& f : folds) {
      std::uint64_t pos = 0;
      for (auto i : f) pos += labels[i];
      ok = ok && !f.empty() && fold_ratio_ok(pos, f.size(), train_pos, split.train.size());
    }
    if (ok) {
      ++good;
    } else if (first_bad.empty()) {
      first_bad = ", first failure at seed " + std::to_string(seed);
    }
  }
  return {good == kStratificationSeeds,
          std::to_string(good) + "/" + std::to_string(kStratificationSeeds) + " seeds partition and stay within 1/|fold|" +
              first_bad};
}

Outcome rule_engine() {
  std::mt19937_64 rng(2718);
  int agree = 0;
  for (int i = 0; i < kOraclePairs; ++i) {
    const json doc = dbom::testing::random_rule_document(rng);
    const auto rules = dbom::testing::random_rules(rng);
    const auto report = compliance_check(doc, compile_rules(dbom::testing::rules_text(rules)));
    std::vector<std::pair<std::string, std::string>> got;
    for (const auto& v : report.violations) got.emplace_back(v.rule, v.observed);
    if (got == dbom::testing::oracle_violations(doc, rules)) ++agree;
  }
  return {agree == kOraclePairs, std::to_string(agree) + "/" + std::to_string(kOraclePairs) + " pairs match the oracle"};
}

Outcome vigilance() {
  dbom::testing::TempDir dir;
  const Digest m = Digest::of("vigilance");
  KeyAuthority authority({m.hex()});
  const auto key = authority.issue_signing_key(m, "reporter");
  VigilanceLog log(dir / "log.jsonl");
  dbom::testing::submit_scripted_reports(log, authority, key.first);
  const auto findings = vigilance_scan(log.entries());
  int drift = 0, rate = 0;
  for (const auto& f : findings) {
    drift += f.kind == "accuracy_drift";
    rate += f.kind == "low_certainty_rate";
  }
  return {findings.size() == 2 && drift == 1 && rate == 1,
          std::to_string(findings.size()) + " findings: accuracy_drift " + std::to_string(drift) +
              ", low_certainty_rate " + std::to_string(rate)};
}

}  // namespace

int main() {
  World world;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"end-to-end", [&] { return end_to_end(world); }},
      {"determinism", [&] { return determinism(world); }},
      {"chain-suite", [&] { return chain_suite(world); }},
      {"tamper-suite", [&] { return tamper_suite(world); }},
      {"crypto-vectors", [] { return crypto_vectors(); }},
      {"numerical", [&] { return numerical(world); }},
      {"stratification", [] { return stratification(); }},
      {"rule-engine", [] { return rule_engine(); }},
      {"vigilance", [] { return vigilance(); }},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
