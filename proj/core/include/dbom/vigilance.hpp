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

#ifndef DBOM_VIGILANCE_HPP_
#define DBOM_VIGILANCE_HPP_

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "dbom/bom.hpp"
#include "dbom/decimal.hpp"
#include "dbom/envelope.hpp"

namespace dbom {

struct Receipt {
  std::uint64_t sequence = 0;
  bool accepted = false;
  bool duplicate = false;
  std::string reason;  // first failure when rejected
};

void to_json(nlohmann::json& j, const Receipt& r);

/// One line of the vigilance log.
struct LogEntry {
  std::uint64_t sequence = 0;
  bool accepted = false;
  bool duplicate = false;
  std::string received_at;
  std::optional<std::string> payload_digest;
  std::optional<BomKind> kind;
  std::optional<std::string> keyid;  // verified signer, or claimed keyid when rejected
  std::string reason;
  std::string envelope;  // submitted bytes, verbatim
};

void to_json(nlohmann::json& j, const LogEntry& e);
void from_json(const nlohmann::json& j, LogEntry& e);

/// Append-only JSON-lines log. Appends are serialized in-process by a mutex
/// and across processes by an exclusive file lock.
class VigilanceLog {
 public:
  explicit VigilanceLog(std::filesystem::path path);

  /// Runs integrity_check, then appends one entry whatever the outcome.
  /// Throws Error(kStorage) and leaves the file unchanged if the append fails.
  Receipt submit(std::string_view envelope_bytes, const KeyLookup& registry);

  /// Throws Error(kStorage) if unreadable, Error(kFormat) on a corrupt line.
  std::vector<LogEntry> entries() const;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  mutable std::mutex mu_;
};

struct VigilancePolicy {
  Decimal drift_threshold = Decimal::from_units(20'000'000);       // 0.02
  Decimal low_certainty_rate = Decimal::from_units(300'000'000);  // 0.30
  std::uint64_t window = 50;
};

struct VigilanceFinding {
  std::string kind;  // accuracy_drift, low_certainty_rate, invalid_report
  std::string subject;
  std::string detail;
  std::uint64_t from_seq = 0;
  std::uint64_t to_seq = 0;
  friend bool operator==(const VigilanceFinding&, const VigilanceFinding&) = default;
};

void to_json(nlohmann::json& j, const VigilanceFinding& f);

/// Pure function of the entries and policy:
///  - accuracy_drift per project when final_test.accuracy falls by more than
///    drift_threshold between consecutive accepted TBOMs;
///  - low_certainty_rate per signing keyid when the share of "low" IBOMs among
///    that key's last min(window, n) accepted IBOMs exceeds the threshold;
///  - invalid_report for every rejected submission.
/// Duplicates are skipped by the first two rules.
std::vector<VigilanceFinding> vigilance_scan(const std::vector<LogEntry>& entries, const VigilancePolicy& policy = {});

}  // namespace dbom

#endif  // DBOM_VIGILANCE_HPP_
