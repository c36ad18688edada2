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

#ifndef DBOM_KEY_AUTHORITY_HPP_
#define DBOM_KEY_AUTHORITY_HPP_

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dbom/digest.hpp"
#include "dbom/envelope.hpp"

namespace dbom {

/// Measurement presented at key issuance: the digest of a pipeline's
/// configuration bytes bound to its pipeline identifier.
///
///   sha256(canonical {"config_digest": sha256(config).hex, "pipeline_id": id})
Digest measure_pipeline(std::string_view config_bytes, std::string_view pipeline_id);

/// Opaque reference to a signing key held by a KeyAuthority. Carries no key
/// material; only the issuing authority instance can sign with it.
class KeyHandle {
 public:
  const std::string& keyid() const { return keyid_; }

 private:
  friend class KeyAuthority;
  KeyHandle(std::string keyid, std::uint64_t authority_id) : keyid_(std::move(keyid)), authority_id_(authority_id) {}
  std::string keyid_;
  std::uint64_t authority_id_;
};

/// JSON-lines file of KeyRecords. Appends are single writes under O_APPEND so
/// concurrent processes never interleave partial records.
class KeyRegistryFile : public KeyLookup {
 public:
  explicit KeyRegistryFile(std::filesystem::path path);

  /// Re-reads the file. Throws Error(kFormat) on a malformed line.
  void reload();
  void append(const KeyRecord& record);
  std::optional<KeyRecord> find(std::string_view keyid) const override;
  std::vector<KeyRecord> records() const;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  mutable std::mutex mu_;
  std::map<std::string, KeyRecord, std::less<>> records_;
};

/// Simulated attestation service. Issues a fresh Ed25519 key per request, but
/// only to pipelines whose measurement is allowlisted; keeps the signing half
/// to itself and publishes the verifying half.
///
/// Thread-safe: issuance, signing and registry updates are serialized on an
/// internal mutex.
class KeyAuthority : public KeyLookup {
 public:
  /// In-memory authority. If `registry` is set, issued records are also
  /// appended to it and its existing records are served by find().
  explicit KeyAuthority(std::set<std::string> allowlist = {},
                        std::shared_ptr<KeyRegistryFile> registry = nullptr);
  ~KeyAuthority() override;

  KeyAuthority(const KeyAuthority&) = delete;
  KeyAuthority& operator=(const KeyAuthority&) = delete;

  void allow(const Digest& measurement);
  bool is_allowed(const Digest& measurement) const;
  std::vector<std::string> allowlist() const;

  /// Throws Error(kAttestationRefused) unless `measurement` is allowlisted.
  std::pair<KeyHandle, KeyRecord> issue_signing_key(const Digest& measurement, std::string_view role_identity);

  /// Registers an externally generated Ed25519 key (32-byte seed). The
  /// measurement must still be allowlisted.
  std::pair<KeyHandle, KeyRecord> import_signing_key(std::string_view seed, const Digest& measurement,
                                                     std::string_view role_identity);

  /// Throws Error(kNotFound).
  KeyRecord lookup_verifying_key(std::string_view keyid) const;
  std::optional<KeyRecord> find(std::string_view keyid) const override;
  std::vector<KeyRecord> records() const;

  /// Drops the signing half; later sign() calls with the handle fail.
  void revoke(const KeyHandle& handle);

  /// Builds a DSSE envelope over `payload`. Throws Error(kKeyUnknown) for a
  /// revoked handle or one issued by another authority.
  Envelope sign(std::string_view payload, const KeyHandle& handle) const;

  /// Adds a signature from `handle` to an existing envelope.
  Envelope countersign(const Envelope& envelope, const KeyHandle& handle) const;

  /// Persistent state: allowlist.json and registry.jsonl inside `dir`.
  /// Signing keys are never written anywhere.
  static void init_state_dir(const std::filesystem::path& dir, const std::vector<Digest>& allow);
  static void add_to_state_dir(const std::filesystem::path& dir, const Digest& measurement);
  static std::unique_ptr<KeyAuthority> open_state_dir(const std::filesystem::path& dir);

 private:
  struct SecretKey;
  std::pair<KeyHandle, KeyRecord> install(std::unique_ptr<SecretKey> key, const Digest& measurement,
                                          std::string_view role_identity);
  std::string sign_raw(std::string_view message, const KeyHandle& handle) const;

  std::uint64_t id_;
  mutable std::mutex mu_;
  std::set<std::string> allowlist_;
  std::map<std::string, KeyRecord, std::less<>> records_;
  std::map<std::string, std::unique_ptr<SecretKey>, std::less<>> secrets_;
  std::shared_ptr<KeyRegistryFile> registry_;
};

/// sign(payload, handle, authority)
inline Envelope sign(std::string_view payload, const KeyHandle& handle, const KeyAuthority& authority) {
  return authority.sign(payload, handle);
}

}  // namespace dbom

#endif  // DBOM_KEY_AUTHORITY_HPP_
