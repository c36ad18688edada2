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

#include "dbom/key_authority.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include <sodium.h>

#include "dbom/bom.hpp"
#include "dbom/canonical.hpp"
#include "dbom/encoding.hpp"
#include "dbom/error.hpp"
#include "sodium_init.hpp"

namespace dbom {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* kAllowlistFile = "allowlist.json";
constexpr const char* kRegistryFile = "registry.jsonl";

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kStorage, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& path, const std::string& bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kStorage, "cannot write " + tmp.string());
    out << bytes;
    if (!out.flush()) throw Error(ErrorCode::kStorage, "cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::kStorage, "cannot replace " + path.string() + ": " + ec.message());
}

std::vector<std::string> read_allowlist(const fs::path& dir) {
  json doc = parse_json(read_file(dir / kAllowlistFile));
  auto it = doc.find("measurements");
  if (!doc.is_object() || it == doc.end() || !it->is_array()) {
    throw Error(ErrorCode::kFormat, "allowlist: expected {\"measurements\": [...]}");
  }
  std::vector<std::string> out;
  for (const auto& m : *it) {
    if (!m.is_string() || !Digest::is_valid_hex(m.get<std::string>())) {
      throw Error(ErrorCode::kFormat, "allowlist: entries must be 64-char lowercase hex");
    }
    out.push_back(m.get<std::string>());
  }
  return out;
}

void write_allowlist(const fs::path& dir, const std::set<std::string>& entries) {
  json doc = {{"measurements", json(std::vector<std::string>(entries.begin(), entries.end()))}};
  write_file_atomic(dir / kAllowlistFile, canonicalize(doc));
}

std::uint64_t random_u64() {
  internal::ensure_sodium();
  std::uint64_t v = 0;
  randombytes_buf(&v, sizeof v);
  return v;
}

}  // namespace

Digest measure_pipeline(std::string_view config_bytes, std::string_view pipeline_id) {
  json doc = {{"config_digest", Digest::of(config_bytes).hex()}, {"pipeline_id", std::string(pipeline_id)}};
  return canonical_digest(doc);
}

// ---------------------------------------------------------------------------

KeyRegistryFile::KeyRegistryFile(fs::path path) : path_(std::move(path)) { reload(); }

void KeyRegistryFile::reload() {
  std::map<std::string, KeyRecord, std::less<>> fresh;
  if (fs::exists(path_)) {
    std::istringstream in(read_file(path_));
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      try {
        auto rec = parse_json(line).get<KeyRecord>();
        fresh[rec.keyid] = std::move(rec);
      } catch (const std::exception& e) {
        throw Error(ErrorCode::kFormat, path_.string() + ":" + std::to_string(lineno) + ": " + e.what());
      }
    }
  }
  std::lock_guard lock(mu_);
  records_ = std::move(fresh);
}

void KeyRegistryFile::append(const KeyRecord& record) {
  std::string line = canonicalize(json(record)) + "\n";
  std::lock_guard lock(mu_);
  int fd = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) throw Error(ErrorCode::kStorage, "cannot open " + path_.string() + ": " + std::strerror(errno));
  ssize_t n = ::write(fd, line.data(), line.size());
  int err = errno;
  ::close(fd);
  if (n != static_cast<ssize_t>(line.size())) {
    throw Error(ErrorCode::kStorage, "short write to " + path_.string() + ": " + std::strerror(err));
  }
  records_[record.keyid] = record;
}

std::optional<KeyRecord> KeyRegistryFile::find(std::string_view keyid) const {
  std::lock_guard lock(mu_);
  auto it = records_.find(keyid);
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

std::vector<KeyRecord> KeyRegistryFile::records() const {
  std::lock_guard lock(mu_);
  std::vector<KeyRecord> out;
  for (const auto& [_, r] : records_) out.push_back(r);
  return out;
}

// ---------------------------------------------------------------------------

struct KeyAuthority::SecretKey {
  unsigned char bytes[crypto_sign_SECRETKEYBYTES];
  SecretKey() { sodium_memzero(bytes, sizeof bytes); }
  ~SecretKey() { sodium_memzero(bytes, sizeof bytes); }
};

KeyAuthority::KeyAuthority(std::set<std::string> allowlist, std::shared_ptr<KeyRegistryFile> registry)
    : id_(random_u64()), allowlist_(std::move(allowlist)), registry_(std::move(registry)) {}

KeyAuthority::~KeyAuthority() = default;

void KeyAuthority::allow(const Digest& measurement) {
  std::lock_guard lock(mu_);
  allowlist_.insert(measurement.hex());
}

bool KeyAuthority::is_allowed(const Digest& measurement) const {
  std::lock_guard lock(mu_);
  return allowlist_.count(measurement.hex()) > 0;
}

std::vector<std::string> KeyAuthority::allowlist() const {
  std::lock_guard lock(mu_);
  return {allowlist_.begin(), allowlist_.end()};
}

std::pair<KeyHandle, KeyRecord> KeyAuthority::install(std::unique_ptr<SecretKey> key, const Digest& measurement,
                                                      std::string_view role_identity) {
  std::string_view pk(reinterpret_cast<const char*>(key->bytes) + crypto_sign_SEEDBYTES, crypto_sign_PUBLICKEYBYTES);
  KeyRecord rec;
  rec.keyid = keyid_for(pk);
  rec.verifying_key = base64_encode(pk);
  rec.bound_measurement = measurement;
  rec.role_identity = std::string(role_identity);
  rec.issued_at = utc_timestamp_now();

  std::lock_guard lock(mu_);
  if (!allowlist_.count(measurement.hex())) {
    throw Error(ErrorCode::kAttestationRefused, "attestation refused: measurement " + measurement.hex() +
                                                    " is not allowlisted");
  }
  if (records_.count(rec.keyid) || secrets_.count(rec.keyid)) {
    throw Error(ErrorCode::kConstruction, "key " + rec.keyid + " is already registered");
  }
  if (registry_) registry_->append(rec);
  records_[rec.keyid] = rec;
  secrets_[rec.keyid] = std::move(key);
  return {KeyHandle(rec.keyid, id_), rec};
}

std::pair<KeyHandle, KeyRecord> KeyAuthority::issue_signing_key(const Digest& measurement,
                                                                std::string_view role_identity) {
  internal::ensure_sodium();
  if (!is_allowed(measurement)) {
    throw Error(ErrorCode::kAttestationRefused, "attestation refused: measurement " + measurement.hex() +
                                                    " is not allowlisted");
  }
  auto key = std::make_unique<SecretKey>();
  unsigned char pk[crypto_sign_PUBLICKEYBYTES];
  crypto_sign_keypair(pk, key->bytes);
  return install(std::move(key), measurement, role_identity);
}

std::pair<KeyHandle, KeyRecord> KeyAuthority::import_signing_key(std::string_view seed, const Digest& measurement,
                                                                 std::string_view role_identity) {
  internal::ensure_sodium();
  if (seed.size() != crypto_sign_SEEDBYTES) {
    throw Error(ErrorCode::kFormat, "imported key seed must be 32 bytes");
  }
  auto key = std::make_unique<SecretKey>();
  unsigned char pk[crypto_sign_PUBLICKEYBYTES];
  crypto_sign_seed_keypair(pk, key->bytes, reinterpret_cast<const unsigned char*>(seed.data()));
  return install(std::move(key), measurement, role_identity);
}

std::optional<KeyRecord> KeyAuthority::find(std::string_view keyid) const {
  {
    std::lock_guard lock(mu_);
    auto it = records_.find(keyid);
    if (it != records_.end()) return it->second;
  }
  if (registry_) {
    if (auto r = registry_->find(keyid)) return r;
    registry_->reload();
    return registry_->find(keyid);
  }
  return std::nullopt;
}

KeyRecord KeyAuthority::lookup_verifying_key(std::string_view keyid) const {
  auto r = find(keyid);
  if (!r) throw Error(ErrorCode::kNotFound, "no key with id '" + std::string(keyid) + "'");
  return *r;
}

std::vector<KeyRecord> KeyAuthority::records() const {
  std::map<std::string, KeyRecord> all;
  if (registry_) {
    for (auto& r : registry_->records()) all[r.keyid] = std::move(r);
  }
  std::lock_guard lock(mu_);
  for (const auto& [k, r] : records_) all[k] = r;
  std::vector<KeyRecord> out;
  for (auto& [_, r] : all) out.push_back(std::move(r));
  return out;
}

void KeyAuthority::revoke(const KeyHandle& handle) {
  std::lock_guard lock(mu_);
  if (handle.authority_id_ == id_) secrets_.erase(handle.keyid_);
}

std::string KeyAuthority::sign_raw(std::string_view message, const KeyHandle& handle) const {
  std::lock_guard lock(mu_);
  auto it = secrets_.find(handle.keyid_);
  if (handle.authority_id_ != id_ || it == secrets_.end()) {
    throw Error(ErrorCode::kKeyUnknown, "unknown key '" + handle.keyid_ + "'");
  }
  unsigned char sig[crypto_sign_BYTES];
  crypto_sign_detached(sig, nullptr, reinterpret_cast<const unsigned char*>(message.data()), message.size(),
                       it->second->bytes);
  return base64_encode(std::span<const unsigned char>(sig, sizeof sig));
}

Envelope KeyAuthority::sign(std::string_view payload, const KeyHandle& handle) const {
  internal::ensure_sodium();
  Envelope e;
  e.payload = base64_encode(payload);
  e.signatures.push_back({handle.keyid_, sign_raw(pae_encode(e.payload_type, payload), handle)});
  return e;
}

Envelope KeyAuthority::countersign(const Envelope& envelope, const KeyHandle& handle) const {
  auto payload = base64_decode(envelope.payload);
  if (!payload) throw Error(ErrorCode::kFormat, "envelope: payload is not valid base64");
  Envelope e = envelope;
  e.signatures.push_back({handle.keyid_, sign_raw(pae_encode(e.payload_type, *payload), handle)});
  return e;
}

void KeyAuthority::init_state_dir(const fs::path& dir, const std::vector<Digest>& allow) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kStorage, "cannot create " + dir.string() + ": " + ec.message());
  std::set<std::string> entries;
  if (fs::exists(dir / kAllowlistFile)) {
    for (auto& m : read_allowlist(dir)) entries.insert(std::move(m));
  }
  for (const auto& d : allow) entries.insert(d.hex());
  write_allowlist(dir, entries);
  if (!fs::exists(dir / kRegistryFile)) std::ofstream(dir / kRegistryFile, std::ios::app);
}

void KeyAuthority::add_to_state_dir(const fs::path& dir, const Digest& measurement) {
  if (!fs::exists(dir / kAllowlistFile)) throw Error(ErrorCode::kNotFound, "no CAS state in " + dir.string());
  init_state_dir(dir, {measurement});
}

std::unique_ptr<KeyAuthority> KeyAuthority::open_state_dir(const fs::path& dir) {
  if (!fs::exists(dir / kAllowlistFile)) throw Error(ErrorCode::kNotFound, "no CAS state in " + dir.string());
  auto entries = read_allowlist(dir);
  auto registry = std::make_shared<KeyRegistryFile>(dir / kRegistryFile);
  return std::make_unique<KeyAuthority>(std::set<std::string>(entries.begin(), entries.end()), std::move(registry));
}

}  // namespace dbom
