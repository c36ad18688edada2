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
#include <openssl/evp.h>

#include <future>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dbom/canonical.hpp"
#include "dbom/digest.hpp"
#include "dbom/encoding.hpp"
#include "dbom/envelope.hpp"
#include "dbom/error.hpp"
#include "dbom/key_authority.hpp"
#include "test_support.hpp"

namespace dbom {
namespace {

using json = nlohmann::json;

std::string unhex(std::string_view hex) {
  std::string out;
  for (std::size_t i = 0; i < hex.size(); i += 2) out.push_back(static_cast<char>(std::stoi(std::string(hex.substr(i, 2)), nullptr, 16)));
  return out;
}

// Ed25519 key pair from the first RFC 8032 test vector.
const std::string kSeed = unhex("9d61b19deffd5a60ba844af492ec2cc44449c5697b326919703bac031cae7f60");
const std::string kPublic = unhex("d75a980182b10ab7d54bfed3c964073a0ee172f3daa62325af021a68f707511a");

std::string openssl_ed25519_sign(const std::string& seed, const std::string& message) {
  EVP_PKEY* key = EVP_PKEY_new_raw_private_key(EVP_PKEY_ED25519, nullptr,
                                               reinterpret_cast<const unsigned char*>(seed.data()), seed.size());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestSignInit(ctx, nullptr, nullptr, nullptr, key);
  unsigned char sig[64];
  std::size_t len = sizeof sig;
  EVP_DigestSign(ctx, sig, &len, reinterpret_cast<const unsigned char*>(message.data()), message.size());
  EVP_MD_CTX_free(ctx);
  EVP_PKEY_free(key);
  return std::string(reinterpret_cast<char*>(sig), len);
}

bool openssl_ed25519_verify(const std::string& pk, const std::string& message, const std::string& sig) {
  EVP_PKEY* key = EVP_PKEY_new_raw_public_key(EVP_PKEY_ED25519, nullptr,
                                              reinterpret_cast<const unsigned char*>(pk.data()), pk.size());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestVerifyInit(ctx, nullptr, nullptr, nullptr, key);
  const int rc = EVP_DigestVerify(ctx, reinterpret_cast<const unsigned char*>(sig.data()), sig.size(),
                                  reinterpret_cast<const unsigned char*>(message.data()), message.size());
  EVP_MD_CTX_free(ctx);
  EVP_PKEY_free(key);
  return rc == 1;
}

class EnvelopeTest : public ::testing::Test {
 protected:
  Digest measurement = Digest::of("pipeline");
  KeyAuthority authority{{measurement.hex()}};
};

TEST(Pae, Encoding) {
  EXPECT_EQ(pae_encode(kDbomPayloadType, "{}"), "DSSEv1 25 application/vnd.dbom+json 2 {}");
  EXPECT_EQ(pae_encode(kDbomPayloadType, ""), "DSSEv1 25 application/vnd.dbom+json 0 ");
  EXPECT_EQ(pae_encode("t", "\xc3\xa9"), "DSSEv1 1 t 2 \xc3\xa9");
}

TEST(Pae, LengthPrefixSeparatesAmbiguousSplits) {
  EXPECT_NE(pae_encode("ab", "c"), pae_encode("a", "bc"));
}

TEST(KeyId, FirstSixteenHexOfKeyDigest) {
  EXPECT_EQ(keyid_for(kPublic), Digest::of(kPublic).hex().substr(0, 16));
}

TEST_F(EnvelopeTest, SignatureMatchesRfcKeyAndOpenSsl) {
  auto [handle, record] = authority.import_signing_key(kSeed, measurement, "provider");
  EXPECT_EQ(record.verifying_key, base64_encode(std::string_view(kPublic)));
  EXPECT_EQ(record.keyid, keyid_for(kPublic));
  const std::string payload = R"({"a":1})";
  const Envelope env = authority.sign(payload, handle);
  ASSERT_EQ(env.signatures.size(), 1u);
  const auto sig = *base64_decode(env.signatures[0].sig);
  const auto pae = pae_encode(kDbomPayloadType, payload);
  // Ed25519 is deterministic, so an independent implementation produces the same bytes.
  EXPECT_EQ(sig, openssl_ed25519_sign(kSeed, pae));
  EXPECT_TRUE(openssl_ed25519_verify(kPublic, pae, sig));
}

TEST_F(EnvelopeTest, RandomRoundTrips) {
  auto [handle, record] = authority.issue_signing_key(measurement, "provider");
  std::mt19937_64 rng(17);
  for (int i = 0; i < 1000; ++i) {
    json doc = {{"n", static_cast<std::int64_t>(rng() % 100000)}, {"s", std::to_string(rng())}};
    const auto payload = canonicalize(doc);
    const auto wire = serialize_envelope(authority.sign(payload, handle));
    const auto verified = verify(parse_envelope(wire), authority);
    ASSERT_EQ(verified.payload, payload);
    ASSERT_EQ(verified.verified_keyids, std::vector<std::string>{record.keyid});
  }
}

TEST_F(EnvelopeTest, EverySingleByteMutationFails) {
  auto [handle, record] = authority.issue_signing_key(measurement, "provider");
  const auto wire = serialize_envelope(authority.sign(R"({"accuracy":"0.990000000"})", handle));
  std::mt19937_64 rng(3);
  int checked = 0;
  for (std::size_t pos = 0; pos < wire.size(); ++pos) {
    for (int trial = 0; trial < 3; ++trial) {
      std::string mutated = wire;
      const auto delta = static_cast<unsigned char>(1 + rng() % 255);
      mutated[pos] = static_cast<char>(static_cast<unsigned char>(mutated[pos]) ^ delta);
      bool passed = false;
      try {
        verify(parse_envelope(mutated), authority);
        passed = true;
      } catch (const Error&) {
      }
      ASSERT_FALSE(passed) << "mutation at byte " << pos;
      ++checked;
    }
  }
  EXPECT_GT(checked, 300);
}

TEST_F(EnvelopeTest, KeyUnknownAndMismatch) {
  auto [handle, record] = authority.issue_signing_key(measurement, "provider");
  Envelope env = authority.sign("{}", handle);
  KeyAuthority other({measurement.hex()});
  try {
    verify(env, other);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kKeyUnknown);
  }
  // Same keyid, different payload: signature no longer covers it.
  env.payload = base64_encode(std::string_view("[]"));
  try {
    verify(env, authority);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSignatureMismatch);
  }
}

TEST_F(EnvelopeTest, FormatErrors) {
  auto [handle, record] = authority.issue_signing_key(measurement, "provider");
  Envelope env = authority.sign("{}", handle);
  auto expect_format = [&](Envelope e) {
    try {
      verify(e, authority);
      FAIL();
    } catch (const Error& err) {
      EXPECT_EQ(err.code(), ErrorCode::kFormat) << err.what();
    }
  };
  Envelope wrong_type = env;
  wrong_type.payload_type = "application/json";
  expect_format(wrong_type);
  Envelope no_sigs = env;
  no_sigs.signatures.clear();
  expect_format(no_sigs);
  Envelope bad_b64 = env;
  bad_b64.payload = "!!!";
  expect_format(bad_b64);
  EXPECT_THROW(parse_envelope("{\"payload\":1}"), Error);
  EXPECT_THROW(parse_envelope("not json"), Error);
}

TEST_F(EnvelopeTest, SignatureUnderForeignKeyidDoesNotCount) {
  auto [h1, r1] = authority.issue_signing_key(measurement, "a");
  auto [h2, r2] = authority.issue_signing_key(measurement, "b");
  Envelope env = authority.sign("{}", h1);
  env.signatures[0].keyid = r2.keyid;
  EXPECT_THROW(verify(env, authority), Error);
}

TEST_F(EnvelopeTest, CountersignAddsSecondVerifiedKey) {
  auto [h1, r1] = authority.issue_signing_key(measurement, "a");
  auto [h2, r2] = authority.issue_signing_key(measurement, "b");
  const Envelope env = authority.countersign(authority.sign("{}", h1), h2);
  const auto v = verify(env, authority);
  EXPECT_EQ(v.verified_keyids.size(), 2u);
}

TEST_F(EnvelopeTest, AttestationRefusedForUnknownMeasurement) {
  try {
    authority.issue_signing_key(Digest::of("other"), "x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kAttestationRefused);
  }
  EXPECT_THROW(authority.import_signing_key(kSeed, Digest::of("other"), "x"), Error);
  EXPECT_THROW(authority.import_signing_key("short", measurement, "x"), Error);
}

TEST_F(EnvelopeTest, LookupAndRevocation) {
  auto [handle, record] = authority.issue_signing_key(measurement, "provider");
  EXPECT_EQ(authority.lookup_verifying_key(record.keyid), record);
  EXPECT_EQ(record.bound_measurement, measurement);
  EXPECT_EQ(keyid_for(*base64_decode(record.verifying_key)), record.keyid);
  try {
    authority.lookup_verifying_key("0000000000000000");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotFound);
  }
  authority.revoke(handle);
  try {
    authority.sign("{}", handle);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kKeyUnknown);
  }
}

TEST_F(EnvelopeTest, HandleFromAnotherAuthorityRejected) {
  auto [handle, record] = authority.issue_signing_key(measurement, "provider");
  KeyAuthority other({measurement.hex()});
  EXPECT_THROW(other.sign("{}", handle), Error);
}

TEST_F(EnvelopeTest, FreshKeyPerIssuance) {
  std::set<std::string> ids;
  for (int i = 0; i < 50; ++i) ids.insert(authority.issue_signing_key(measurement, "p").second.keyid);
  EXPECT_EQ(ids.size(), 50u);
}

TEST(KeyRegistry, PersistsWithoutSecrets) {
  testing::TempDir dir;
  const auto m = Digest::of("m");
  KeyAuthority::init_state_dir(dir.path(), {m});
  std::string keyid;
  Envelope env;
  {
    auto authority = KeyAuthority::open_state_dir(dir.path());
    auto [handle, record] = authority->import_signing_key(kSeed, m, "provider");
    keyid = record.keyid;
    env = authority->sign("{}", handle);
  }
  KeyRegistryFile registry(dir.path() / "registry.jsonl");
  registry.reload();
  ASSERT_TRUE(registry.find(keyid).has_value());
  EXPECT_EQ(verify(env, registry).payload, "{}");
  // Neither the seed nor the 64-byte secret key appears in any state file.
  for (const auto& entry : std::filesystem::directory_iterator(dir.path())) {
    const auto bytes = testing::read_file(entry.path());
    EXPECT_EQ(bytes.find(base64_encode(std::string_view(kSeed))), std::string::npos);
    EXPECT_EQ(bytes.find(hex_encode(std::span<const unsigned char>(
                  reinterpret_cast<const unsigned char*>(kSeed.data()), kSeed.size()))),
              std::string::npos);
    EXPECT_EQ(bytes.find(kSeed), std::string::npos);
  }
  auto reopened = KeyAuthority::open_state_dir(dir.path());
  EXPECT_TRUE(reopened->find(keyid).has_value());
  EXPECT_TRUE(reopened->is_allowed(m));
  KeyAuthority::add_to_state_dir(dir.path(), Digest::of("n"));
  EXPECT_TRUE(KeyAuthority::open_state_dir(dir.path())->is_allowed(Digest::of("n")));
}

TEST(KeyRegistry, ConcurrentIssuanceKeepsEveryRecord) {
  testing::TempDir dir;
  const auto m = Digest::of("m");
  auto registry = std::make_shared<KeyRegistryFile>(dir / "registry.jsonl");
  KeyAuthority authority({m.hex()}, registry);
  std::vector<std::future<std::string>> futures;
  for (int i = 0; i < 8; ++i) {
    futures.push_back(std::async(std::launch::async, [&] {
      std::string last;
      for (int j = 0; j < 10; ++j) last = authority.issue_signing_key(m, "p").second.keyid;
      return last;
    }));
  }
  for (auto& f : futures) f.get();
  KeyRegistryFile fresh(dir / "registry.jsonl");
  fresh.reload();
  EXPECT_EQ(fresh.records().size(), 80u);
}

TEST(Measurement, BindsConfigAndPipeline) {
  const auto expected = canonical_digest(json{{"config_digest", Digest::of("cfg").hex()}, {"pipeline_id", "p"}});
  EXPECT_EQ(measure_pipeline("cfg", "p"), expected);
  EXPECT_NE(measure_pipeline("cfg", "q"), expected);
}

}  // namespace
}  // namespace dbom
