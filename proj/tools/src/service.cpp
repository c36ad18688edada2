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

#include "dbom/frontends/service.hpp"

#include <fstream>
#include <sstream>

#include <httplib.h>

#include "dbom/canonical.hpp"
#include "dbom/encoding.hpp"
#include "dbom/error.hpp"
#include "dbom/integrity.hpp"

namespace dbom::frontends {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kConfig, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path resolve(const json& j, const char* name, const fs::path& base) {
  auto it = j.find(name);
  if (it == j.end() || !it->is_string() || it->get<std::string>().empty()) {
    throw Error(ErrorCode::kConfig, std::string("'") + name + "' is required");
  }
  fs::path p = it->get<std::string>();
  return p.is_absolute() ? p : base / p;
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kStorage: return 500;
    case ErrorCode::kAttestationRefused:
    case ErrorCode::kKeyUnknown: return 503;
    default: return 400;
  }
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const Error& e) {
  send_json(res, http_status(e.code()),
            {{"error", std::string(to_string(e.code()))},
             {"message", e.what()},
             {"violations", json::array({{{"path", "(body)"}, {"message", e.what()}}})}});
}

template <typename F>
void guarded(httplib::Response& res, F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    send_error(res, e);
  } catch (const json::exception& e) {
    send_json(res, 400, {{"error", "format"},
                         {"message", e.what()},
                         {"violations", json::array({{{"path", "(body)"}, {"message", e.what()}}})}});
  } catch (const std::exception& e) {
    send_json(res, 500, {{"error", "internal"}, {"message", e.what()}});
  }
}

}  // namespace

ServiceConfig parse_service_config(std::string_view bytes, const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(bytes);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("service config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kConfig, "service config must be a JSON object");
  ServiceConfig c;
  if (auto it = j.find("bind"); it != j.end()) {
    if (!it->is_string()) throw Error(ErrorCode::kConfig, "'bind' must be host:port");
    auto bind = it->get<std::string>();
    auto colon = bind.rfind(':');
    if (colon == std::string::npos) throw Error(ErrorCode::kConfig, "'bind' must be host:port");
    c.host = bind.substr(0, colon);
    try {
      c.port = std::stoi(bind.substr(colon + 1));
    } catch (const std::exception&) {
      throw Error(ErrorCode::kConfig, "'bind' has a malformed port");
    }
  }
  c.model_path = resolve(j, "model_path", base_dir);
  c.tbom_path = resolve(j, "tbom_path", base_dir);
  if (auto it = j.find("cas_dir"); it != j.end()) c.cas_dir = resolve(j, "cas_dir", base_dir);
  c.registry_path = (c.cas_dir && !j.contains("registry_path")) ? *c.cas_dir / "registry.jsonl"
                                                                : resolve(j, "registry_path", base_dir);
  c.vigilance_log_path = resolve(j, "vigilance_log_path", base_dir);
  if (auto it = j.find("authority_allowlist"); it != j.end()) {
    if (!it->is_array()) throw Error(ErrorCode::kConfig, "'authority_allowlist' must be a list of digests");
    for (const auto& m : *it) {
      auto d = m.is_string() ? Digest::from_hex(m.get<std::string>()) : std::nullopt;
      if (!d) throw Error(ErrorCode::kConfig, "'authority_allowlist' entries must be 64-char lowercase hex");
      c.authority_allowlist.push_back(*d);
    }
  }
  c.pipeline_id = j.value("pipeline_id", c.pipeline_id);
  c.role_identity = j.value("role_identity", c.role_identity);
  return c;
}

DbomService::DbomService(ServiceConfig config) : config_(std::move(config)) {
  registry_ = std::make_shared<KeyRegistryFile>(config_.registry_path);
  std::set<std::string> allow;
  for (const auto& d : config_.authority_allowlist) allow.insert(d.hex());
  if (config_.cas_dir) {
    for (auto& m : KeyAuthority::open_state_dir(*config_.cas_dir)->allowlist()) allow.insert(std::move(m));
  }
  authority_ = std::make_unique<KeyAuthority>(std::move(allow), registry_);

  const std::string tbom_text = read_file(config_.tbom_path);
  auto report = integrity_check(tbom_text, *registry_, BomKind::kTbom);
  if (!report.pass()) {
    const auto& f = report.failures.front();
    throw Error(f.stage == "signature" ? ErrorCode::kSignatureMismatch
                                       : (f.stage == "key" ? ErrorCode::kKeyUnknown : ErrorCode::kValidation),
                "tbom failed integrity check at " + f.stage + ": " + f.message);
  }
  Tbom tbom = parse_json(report.payload).get<Tbom>();
  engine_ = std::make_unique<InferenceEngine>(read_file(config_.model_path), std::move(tbom), "dbom-http");
  measurement_ = engine_->measurement(config_.pipeline_id);
  auto issued = authority_->issue_signing_key(measurement_, config_.role_identity);
  handle_ = std::make_unique<KeyHandle>(issued.first);
  key_ = issued.second;
  vigilance_ = std::make_unique<VigilanceLog>(config_.vigilance_log_path);
  remember(report.payload, tbom_text);

  server_ = std::make_unique<httplib::Server>();
  routes();
}

DbomService::~DbomService() {
  if (server_) server_->stop();
}

void DbomService::remember(const std::string& payload, const std::string& envelope_text) {
  std::lock_guard lock(boms_mu_);
  boms_[Digest::of(payload).hex()] = envelope_text;
}

void DbomService::routes() {
  auto& s = *server_;

  s.Get("/health", [](const httplib::Request&, httplib::Response& res) { send_json(res, 200, {{"status", "ok"}}); });

  s.Get("/keys", [this](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 200, {{"keys", authority_->records()}}); });
  });

  s.Get(R"(/keys/([0-9a-f]+))", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 200, json(authority_->lookup_verifying_key(req.matches[1].str()))); });
  });

  s.Get(R"(/bom/([0-9a-f]{64}))", [this](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard lock(boms_mu_);
    auto it = boms_.find(req.matches[1].str());
    if (it == boms_.end()) {
      send_json(res, 404, {{"error", "not-found"}, {"message", "no BOM with that payload digest"}});
      return;
    }
    res.status = 200;
    res.set_content(it->second, "application/json");
  });

  s.Post("/infer", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      auto out = engine_->run(req.body, *authority_, *handle_);
      const std::string envelope_text = serialize_envelope(out.envelope);
      remember(out.payload, envelope_text);
      json body = {{"envelope", json(out.envelope)},
                   {"ibom_digest", Digest::of(out.payload).hex()},
                   {"decision", out.ibom.prediction.decision},
                   {"certainty", std::string(to_string(out.ibom.prediction.certainty))},
                   {"probability_poisonous", out.ibom.prediction.probability_poisonous.to_string()},
                   {"summary", decision_summary(out.ibom)}};
      send_json(res, 200, body);
    });
  });

  s.Post("/whatif", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      json body = parse_json(req.body);
      if (!body.is_object() || !body.contains("features")) {
        throw Error(ErrorCode::kFormat, "body must be {\"features\": {...}, \"overrides\": {...}}");
      }
      FeatureMap features = parse_feature_map(body["features"].dump());
      std::map<std::string, int> overrides;
      if (auto it = body.find("overrides"); it != body.end()) {
        if (!it->is_object()) throw Error(ErrorCode::kFormat, "'overrides' must map concept -> 0|1");
        for (const auto& [k, v] : it->items()) {
          if (!v.is_number_integer()) throw Error(ErrorCode::kFormat, "override for '" + k + "' must be 0 or 1");
          overrides[k] = v.get<int>();
        }
      }
      send_json(res, 200, json(what_if(engine_->model(), features, overrides)));
    });
  });

  s.Post("/verify", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 200, json(integrity_check(req.body, *authority_))); });
  });

  s.Post("/vigilance/report", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 200, json(vigilance_->submit(req.body, *authority_))); });
  });
}

bool DbomService::listen() { return server_->listen(config_.host, config_.port); }

int DbomService::bind_ephemeral() { return server_->bind_to_any_port(config_.host); }

bool DbomService::listen_after_bind() { return server_->listen_after_bind(); }

void DbomService::stop() { server_->stop(); }

void DbomService::wait_until_ready() const { server_->wait_until_ready(); }

}  // namespace dbom::frontends
