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
#include <openssl/sha.h>

#include <random>
#include <string>

#include <nlohmann/json.hpp>

#include "dbom/canonical.hpp"
#include "dbom/digest.hpp"
#include "dbom/encoding.hpp"
#include "dbom/error.hpp"

namespace dbom {
namespace {

using json = nlohmann::json;

std::string openssl_sha256_hex(const std::string& data) {
  unsigned char md[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(data.data()), data.size(), md);
  return hex_encode(std::span<const unsigned char>(md, sizeof md));
}

TEST(Digest, KnownVectors) {
  EXPECT_EQ(Digest::of("").hex(), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(Digest::of("abc").hex(), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(Digest::of(R"({"a":2,"b":1})").hex(),
            "d3626ac30a87e6f7a6428233b3c68299976865fa5508e4267c5415c76af7a772");
}

TEST(Digest, MatchesOpenSslOnRandomInputs) {
  std::mt19937_64 rng(2026);
  for (int i = 0; i < 500; ++i) {
    std::string data(rng() % 3000, '\0');
    for (auto& c : data) c = static_cast<char>(rng() & 0xff);
    ASSERT_EQ(Digest::of(data).hex(), openssl_sha256_hex(data)) << "length " << data.size();
  }
}

TEST(Digest, HexValidation) {
  const std::string good(64, 'a');
  EXPECT_TRUE(Digest::from_hex(good).has_value());
  EXPECT_FALSE(Digest::from_hex(std::string(63, 'a')).has_value());
  EXPECT_FALSE(Digest::from_hex(std::string(65, 'a')).has_value());
  EXPECT_FALSE(Digest::from_hex(std::string(64, 'A')).has_value());
  EXPECT_FALSE(Digest::from_hex(std::string(63, 'a') + "g").has_value());
}

TEST(Digest, JsonFormNamesAlgorithm) {
  json j = Digest::of("abc");
  EXPECT_EQ(j.at("algorithm"), "sha256");
  EXPECT_EQ(j.get<Digest>(), Digest::of("abc"));
}

TEST(Base64, RoundTripAndStrictness) {
  EXPECT_EQ(base64_encode(std::string_view("foobar")), "Zm9vYmFy");
  EXPECT_EQ(base64_encode(std::string_view("fo")), "Zm8=");
  EXPECT_EQ(*base64_decode("Zm8="), "fo");
  EXPECT_FALSE(base64_decode("Zm8").has_value());
  EXPECT_FALSE(base64_decode("Zm9=").has_value());  // non-zero trailing bits
  EXPECT_FALSE(base64_decode("Zm 8=").has_value());
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    std::string data(rng() % 200, '\0');
    for (auto& c : data) c = static_cast<char>(rng() & 0xff);
    ASSERT_EQ(*base64_decode(base64_encode(std::string_view(data))), data);
  }
}

TEST(Canonical, SortsKeysWithoutWhitespace) {
  EXPECT_EQ(canonicalize(json::parse(R"({ "b": 1, "a": 2 })")), R"({"a":2,"b":1})");
  EXPECT_EQ(canonicalize(json::parse(R"({"z":[3,{"y":null,"x":true}],"a":"t"})")),
            R"({"a":"t","z":[3,{"x":true,"y":null}]})");
  EXPECT_EQ(canonical_digest(json::parse(R"({"b":1,"a":2})")).hex(),
            "d3626ac30a87e6f7a6428233b3c68299976865fa5508e4267c5415c76af7a772");
}

TEST(Canonical, MinimalEscapes) {
  json j = std::string("q\"b\\n\nt\t\x01/\xc3\xa9");
  EXPECT_EQ(canonicalize(j), "\"q\\\"b\\\\n\\nt\\t\\u0001/\xc3\xa9\"");
}

TEST(Canonical, RejectsFloatsWithPath) {
  json j = {{"performance", {{"accuracy", 0.95}}}};
  try {
    canonicalize(j);
    FAIL() << "expected a canonicalization error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCanonicalization);
    EXPECT_NE(std::string(e.what()).find("performance.accuracy"), std::string::npos) << e.what();
  }
  json arr = {{"xs", {1, 2, 2.5}}};
  try {
    canonicalize(arr);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("xs.2"), std::string::npos) << e.what();
  }
}

TEST(Canonical, RejectsInvalidUtf8AndBinary) {
  json bad = {{"k", std::string("\xff\xfe")}};
  EXPECT_THROW(canonicalize(bad), Error);
  json bad_key;
  bad_key[std::string("\xc3")] = 1;
  EXPECT_THROW(canonicalize(bad_key), Error);
  EXPECT_THROW(canonicalize(json::binary({1, 2, 3})), Error);
}

TEST(Canonical, Utf8Validator) {
  EXPECT_TRUE(is_valid_utf8("plain"));
  EXPECT_TRUE(is_valid_utf8("\xe2\x82\xac"));
  EXPECT_FALSE(is_valid_utf8("\xc0\xaf"));          // overlong
  EXPECT_FALSE(is_valid_utf8("\xed\xa0\x80"));      // surrogate
  EXPECT_FALSE(is_valid_utf8("\xf4\x90\x80\x80"));  // above U+10FFFF
  EXPECT_FALSE(is_valid_utf8("\xe2\x82"));
}

json random_doc(std::mt19937_64& rng, int depth) {
  const int kind = static_cast<int>(rng() % (depth > 3 ? 4 : 6));
  switch (kind) {
    case 0: return nullptr;
    case 1: return (rng() & 1) != 0;
    case 2: return static_cast<std::int64_t>(rng() % 2000001) - 1000000;
    case 3: {
      std::string s;
      const auto n = rng() % 8;
      for (std::uint64_t i = 0; i < n; ++i) s.push_back(static_cast<char>(0x01 + rng() % 0x7e));
      return s;
    }
    case 4: {
      json a = json::array();
      const auto n = rng() % 5;
      for (std::uint64_t i = 0; i < n; ++i) a.push_back(random_doc(rng, depth + 1));
      return a;
    }
    default: {
      json o = json::object();
      const auto n = rng() % 5;
      for (std::uint64_t i = 0; i < n; ++i) o["k" + std::to_string(rng() % 20)] = random_doc(rng, depth + 1);
      return o;
    }
  }
}

TEST(Canonical, ParseCanonicalizeIsIdempotent) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 500; ++i) {
    const json doc = random_doc(rng, 0);
    const auto once = canonicalize(doc);
    const auto pretty = doc.dump(3);
    EXPECT_EQ(canonicalize(parse_json(pretty)), once);
    EXPECT_EQ(canonicalize(parse_json(once)), once);
  }
}

TEST(Canonical, ParseJsonReportsFormatError) {
  try {
    parse_json("{\"a\":");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFormat);
  }
}

}  // namespace
}  // namespace dbom
