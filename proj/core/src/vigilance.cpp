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

#include "dbom/vigilance.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "dbom/canonical.hpp"
#include "dbom/encoding.hpp"
#include "dbom/error.hpp"
#include "int128.hpp"
#include "dbom/integrity.hpp"

namespace dbom {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::optional<BomKind> kind_from_string(std::string_view s) {
  if (s == "tbom") return BomKind::kTbom;
  if (s == "ibom") return BomKind::kIbom;
  return std::nullopt;
}

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

std::vector<LogEntry> parse_entries(std::string_view text, const fs::path& path) {
  std::vector<LogEntry> out;
  std::size_t pos = 0;
  std::size_t lineno = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == text.npos ? text.npos : nl - pos);
    pos = nl == text.npos ? text.size() : nl + 1;
    ++lineno;
    if (line.empty()) continue;
    try {
      out.push_back(parse_json(line).get<LogEntry>());
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kFormat, path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

class FdGuard {
 public:
  explicit FdGuard(int fd) : fd_(fd) {}
  ~FdGuard() {
    if (fd_ >= 0) ::close(fd_);
  }
  int get() const { return fd_; }

 private:
  int fd_;
};

std::string read_fd(int fd) {
  std::string out;
  char buf[65536];
  if (::lseek(fd, 0, SEEK_SET) < 0) throw Error(ErrorCode::kStorage, std::strerror(errno));
  while (true) {
    ssize_t n = ::read(fd, buf, sizeof buf);
    if (n < 0) throw Error(ErrorCode::kStorage, std::strerror(errno));
    if (n == 0) break;
    out.append(buf, static_cast<std::size_t>(n));
  }
  return out;
}

}  // namespace

void to_json(json& j, const Receipt& r) {
  j = {{"sequence", r.sequence}, {"accepted", r.accepted}, {"duplicate", r.duplicate}, {"reason", r.reason}};
}

void to_json(json& j, const LogEntry& e) {
  j = {{"sequence", e.sequence},
       {"accepted", e.accepted},
       {"duplicate", e.duplicate},
       {"received_at", e.received_at},
       {"payload_digest", opt(e.payload_digest)},
       {"kind", e.kind ? json(std::string(to_string(*e.kind))) : json(nullptr)},
       {"keyid", opt(e.keyid)},
       {"reason", e.reason},
       {"envelope", e.envelope}};
}

void from_json(const json& j, LogEntry& e) {
  e.sequence = j.at("sequence").get<std::uint64_t>();
  e.accepted = j.at("accepted").get<bool>();
  e.duplicate = j.at("duplicate").get<bool>();
  e.received_at = j.at("received_at").get<std::string>();
  const auto& pd = j.at("payload_digest");
  e.payload_digest = pd.is_null() ? std::nullopt : std::optional<std::string>(pd.get<std::string>());
  const auto& k = j.at("kind");
  e.kind = k.is_null() ? std::nullopt : kind_from_string(k.get<std::string>());
  const auto& kid = j.at("keyid");
  e.keyid = kid.is_null() ? std::nullopt : std::optional<std::string>(kid.get<std::string>());
  e.reason = j.at("reason").get<std::string>();
  e.envelope = j.at("envelope").get<std::string>();
}

void to_json(json& j, const VigilanceFinding& f) {
  j = {{"kind", f.kind},
       {"subject", f.subject},
       {"detail", f.detail},
       {"window", {{"from_seq", f.from_seq}, {"to_seq", f.to_seq}}}};
}

VigilanceLog::VigilanceLog(fs::path path) : path_(std::move(path)) {}

Receipt VigilanceLog::submit(std::string_view envelope_bytes, const KeyLookup& registry) {
  IntegrityReport report = integrity_check(envelope_bytes, registry);

  LogEntry entry;
  entry.accepted = report.pass();
  entry.received_at = utc_timestamp_now();
  entry.kind = report.kind;
  entry.envelope = std::string(envelope_bytes);
  if (!is_valid_utf8(entry.envelope)) entry.envelope = "<not UTF-8>";
  if (report.keyid_used) {
    entry.keyid = report.keyid_used;
  } else {
    try {
      auto env = parse_envelope(envelope_bytes);
      if (!env.signatures.empty()) entry.keyid = env.signatures.front().keyid;
    } catch (const std::exception&) {
    }
  }
  if (!report.payload.empty()) entry.payload_digest = Digest::of(report.payload).hex();
  if (!entry.accepted && !report.failures.empty()) {
    entry.reason = report.failures.front().stage + ": " + report.failures.front().message;
  }

  std::lock_guard lock(mu_);
  FdGuard fd(::open(path_.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644));
  if (fd.get() < 0) throw Error(ErrorCode::kStorage, "cannot open " + path_.string() + ": " + std::strerror(errno));
  if (::flock(fd.get(), LOCK_EX) != 0) throw Error(ErrorCode::kStorage, std::string("cannot lock log: ") + std::strerror(errno));

  const std::string existing = read_fd(fd.get());
  auto prior = parse_entries(existing, path_);
  entry.sequence = prior.empty() ? 1 : prior.back().sequence + 1;
  if (entry.accepted && entry.payload_digest) {
    for (const auto& p : prior) {
      if (p.accepted && p.payload_digest == entry.payload_digest) {
        entry.duplicate = true;
        break;
      }
    }
  }

  std::string line = canonicalize(json(entry)) + "\n";
  const off_t before = static_cast<off_t>(existing.size());
  ssize_t n = ::pwrite(fd.get(), line.data(), line.size(), before);
  if (n != static_cast<ssize_t>(line.size()) || ::fsync(fd.get()) != 0) {
    int err = errno;
    if (::ftruncate(fd.get(), before) != 0) {
      // Nothing more can be done; the partial line is reported as corruption on the next read.
    }
    throw Error(ErrorCode::kStorage, "append to " + path_.string() + " failed: " + std::strerror(err));
  }
  return {entry.sequence, entry.accepted, entry.duplicate, entry.reason};
}

std::vector<LogEntry> VigilanceLog::entries() const {
  std::lock_guard lock(mu_);
  std::ifstream in(path_, std::ios::binary);
  if (!in) throw Error(ErrorCode::kStorage, "cannot read vigilance log " + path_.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_entries(ss.str(), path_);
}

std::vector<VigilanceFinding> vigilance_scan(const std::vector<LogEntry>& entries, const VigilancePolicy& policy) {
  std::vector<VigilanceFinding> findings;

  struct AccuracyPoint {
    std::uint64_t seq;
    Decimal accuracy;
  };
  std::map<std::string, std::vector<AccuracyPoint>> by_project;
  struct CertaintyPoint {
    std::uint64_t seq;
    bool low;
  };
  std::map<std::string, std::vector<CertaintyPoint>> by_key;

  for (const auto& e : entries) {
    if (!e.accepted) {
      findings.push_back({"invalid_report", e.keyid.value_or("unknown"),
                          "rejected submission: " + e.reason, e.sequence, e.sequence});
      continue;
    }
    if (e.duplicate || !e.kind) continue;
    json payload;
    try {
      auto env = parse_envelope(e.envelope);
      auto bytes = base64_decode(env.payload);
      if (!bytes) continue;
      payload = parse_json(*bytes);
    } catch (const std::exception&) {
      continue;
    }
    if (*e.kind == BomKind::kTbom) {
      const auto* name = payload.contains("project_metadata") ? &payload["project_metadata"]["name"] : nullptr;
      const auto& ft = payload["performance_metrics"]["final_test"]["accuracy"];
      if (!name || !name->is_string() || !ft.is_string()) continue;
      auto acc = Decimal::parse(ft.get<std::string>());
      if (acc) by_project[name->get<std::string>()].push_back({e.sequence, *acc});
    } else {
      const auto& level = payload["inference_results"]["decision_metrics"]["certainty_level"];
      if (!level.is_string()) continue;
      by_key[e.keyid.value_or("unknown")].push_back({e.sequence, level.get<std::string>() == "low"});
    }
  }

  std::vector<VigilanceFinding> drift;
  for (const auto& [project, points] : by_project) {
    for (std::size_t i = 1; i < points.size(); ++i) {
      Decimal drop = points[i - 1].accuracy - points[i].accuracy;
      if (drop > policy.drift_threshold) {
        drift.push_back({"accuracy_drift", project,
                         "final_test.accuracy " + points[i - 1].accuracy.to_string() + " -> " +
                             points[i].accuracy.to_string() + " (drop " + drop.to_string() + " > " +
                             policy.drift_threshold.to_string() + ")",
                         points[i - 1].seq, points[i].seq});
      }
    }
  }

  std::vector<VigilanceFinding> rate;
  for (const auto& [keyid, points] : by_key) {
    if (points.empty() || policy.window == 0) continue;
    std::size_t n = std::min<std::size_t>(policy.window, points.size());
    std::uint64_t low = 0;
    for (std::size_t i = points.size() - n; i < points.size(); ++i) low += points[i].low ? 1 : 0;
    Decimal r = Decimal::ratio(low, n);
    // Compare exactly: low / n > threshold  <=>  low * 1e9 > threshold_units * n.
    internal::u128 lhs = static_cast<internal::u128>(low) * Decimal::kScale;
    internal::u128 rhs = static_cast<internal::u128>(policy.low_certainty_rate.units()) * n;
    if (lhs > rhs) {
      rate.push_back({"low_certainty_rate", keyid,
                      std::to_string(low) + "/" + std::to_string(n) + " low-certainty decisions (rate " +
                          r.to_string() + " > " + policy.low_certainty_rate.to_string() + ")",
                      points[points.size() - n].seq, points.back().seq});
    }
  }

  std::vector<VigilanceFinding> out;
  out.insert(out.end(), drift.begin(), drift.end());
  out.insert(out.end(), rate.begin(), rate.end());
  out.insert(out.end(), findings.begin(), findings.end());
  return out;
}

}  // namespace dbom
