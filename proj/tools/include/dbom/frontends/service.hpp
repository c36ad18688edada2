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

#ifndef DBOM_FRONTENDS_SERVICE_HPP_
#define DBOM_FRONTENDS_SERVICE_HPP_

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dbom/digest.hpp"
#include "dbom/inference.hpp"
#include "dbom/key_authority.hpp"
#include "dbom/vigilance.hpp"

namespace httplib {
class Server;
}

namespace dbom::frontends {

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path model_path;
  std::filesystem::path tbom_path;  // signed TBOM envelope
  std::filesystem::path registry_path;
  std::filesystem::path vigilance_log_path;
  std::vector<Digest> authority_allowlist;
  std::optional<std::filesystem::path> cas_dir;  // adds its allowlist; default registry
  std::string pipeline_id{kDefaultInferencePipelineId};
  std::string role_identity = "deployer";
};

/// JSON: {"bind": "host:port", "model_path", "tbom_path", "registry_path",
/// "vigilance_log_path", "authority_allowlist": [hex], "cas_dir"?, "pipeline_id"?}.
/// With "cas_dir", "registry_path" may be omitted.
/// Relative paths resolve against `base_dir`. Throws Error(kConfig).
ServiceConfig parse_service_config(std::string_view bytes, const std::filesystem::path& base_dir);

/// HTTP front of one verified model.
///
///   GET  /health                  {"status":"ok"}
///   GET  /keys, /keys/{keyid}     published KeyRecords
///   GET  /bom/{digest}            envelope whose payload has that digest
///   POST /infer                   feature map -> signed IBOM envelope + summary
///   POST /whatif                  {"features", "overrides"} -> unsigned result
///   POST /verify                  envelope -> IntegrityReport
///   POST /vigilance/report        envelope -> Receipt
class DbomService {
 public:
  /// Verifies the TBOM envelope and the model, and obtains the signing key.
  /// Throws Error(kModelTampered) / Error(kAttestationRefused) / others
  /// instead of serving anything.
  explicit DbomService(ServiceConfig config);
  ~DbomService();

  DbomService(const DbomService&) = delete;
  DbomService& operator=(const DbomService&) = delete;

  /// Binds and serves until stop(). Returns false if the bind fails.
  bool listen();
  /// Binds to an ephemeral port on the configured host; returns it or -1.
  int bind_ephemeral();
  /// Serves on a socket bound by bind_ephemeral().
  bool listen_after_bind();
  void stop();
  void wait_until_ready() const;

  const Digest& measurement() const { return measurement_; }
  const KeyRecord& signing_key() const { return key_; }
  const InferenceEngine& engine() const { return *engine_; }

 private:
  void routes();
  void remember(const std::string& payload, const std::string& envelope_text);

  ServiceConfig config_;
  std::shared_ptr<KeyRegistryFile> registry_;
  std::unique_ptr<KeyAuthority> authority_;
  std::unique_ptr<InferenceEngine> engine_;
  std::unique_ptr<KeyHandle> handle_;
  KeyRecord key_;
  Digest measurement_;
  std::unique_ptr<VigilanceLog> vigilance_;
  std::unique_ptr<httplib::Server> server_;
  std::mutex boms_mu_;
  std::map<std::string, std::string> boms_;  // payload digest -> envelope text
};

}  // namespace dbom::frontends

#endif  // DBOM_FRONTENDS_SERVICE_HPP_
