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

#include "dbom/frontends/cli.hpp"

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "dbom/canonical.hpp"
#include "dbom/compliance.hpp"
#include "dbom/encoding.hpp"
#include "dbom/error.hpp"
#include "dbom/inference.hpp"
#include "dbom/integrity.hpp"
#include "dbom/key_authority.hpp"
#include "dbom/training_job.hpp"
#include "dbom/vigilance.hpp"
#include "dbom/frontends/service.hpp"

namespace dbom::frontends {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kStorage, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out.flush()) throw Error(ErrorCode::kStorage, "cannot write " + path.string());
}

// Failures of a check, as opposed to bad invocations or I/O problems.
bool is_check_failure(ErrorCode code) {
  switch (code) {
    case ErrorCode::kAttestationRefused:
    case ErrorCode::kModelTampered:
    case ErrorCode::kSignatureMismatch:
    case ErrorCode::kKeyUnknown:
    case ErrorCode::kValidation:
    case ErrorCode::kOutOfVocabulary:
    case ErrorCode::kMissingAttribute:
    case ErrorCode::kUnknownConcept:
      return true;
    default:
      return false;
  }
}

struct RegistryArgs {
  std::string cas;
  std::string registry;

  void attach(CLI::App* cmd) {
    auto* c = cmd->add_option("--cas", cas, "CAS state directory (allowlist.json, registry.jsonl)");
    auto* r = cmd->add_option("--registry", registry, "key registry file (JSON lines)");
    c->excludes(r);
  }

  std::unique_ptr<KeyLookup> open() const {
    if (!cas.empty()) return std::make_unique<KeyRegistryFile>(fs::path(cas) / "registry.jsonl");
    if (!registry.empty()) {
      if (!fs::exists(registry)) throw Error(ErrorCode::kNotFound, "no registry at " + registry);
      return std::make_unique<KeyRegistryFile>(registry);
    }
    throw Error(ErrorCode::kConfig, "one of --cas or --registry is required");
  }
};

class Printer {
 public:
  Printer(std::ostream& out, bool as_json) : out_(out), json_(as_json) {}
  bool json_mode() const { return json_; }
  void emit(const json& j, const std::string& text) {
    if (json_) {
      out_ << j.dump(2) << "\n";
    } else {
      out_ << text;
      if (!text.empty() && text.back() != '\n') out_ << "\n";
    }
  }

 private:
  std::ostream& out_;
  bool json_;
};

std::string integrity_text(const IntegrityReport& r, std::string_view label) {
  std::ostringstream s;
  if (r.pass()) {
    s << "PASS " << label << " (" << (r.kind ? to_string(*r.kind) : "?") << ", signed by " << *r.keyid_used << ")";
    return s.str();
  }
  const auto& first = r.failures.front();
  s << "FAIL " << label << " at stage " << first.stage << ": " << first.message << "\n";
  for (std::size_t i = 1; i < r.failures.size(); ++i) {
    s << "  also " << r.failures[i].stage << ": " << r.failures[i].message << "\n";
  }
  for (const auto& v : r.violations) s << "  " << v.path << ": " << v.message << "\n";
  return s.str();
}

std::optional<BomKind> parse_kind(const std::string& s) {
  if (s.empty()) return std::nullopt;
  if (s == "tbom") return BomKind::kTbom;
  if (s == "ibom") return BomKind::kIbom;
  throw Error(ErrorCode::kConfig, "--kind must be tbom or ibom");
}

fs::path summary_path_for(const fs::path& envelope_path) {
  std::string s = envelope_path.string();
  const std::string suffix = ".dbom.json";
  if (s.size() > suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0) {
    return s.substr(0, s.size() - suffix.size()) + ".summary.txt";
  }
  return s + ".summary.txt";
}

Tbom verified_tbom(const std::string& text, const KeyLookup& registry, std::string& keyid, Printer& p) {
  auto report = integrity_check(text, registry, BomKind::kTbom);
  if (!report.pass()) {
    p.emit(json(report), integrity_text(report, "tbom"));
    throw Error(ErrorCode::kValidation, "tbom failed integrity check");
  }
  keyid = *report.keyid_used;
  return parse_json(report.payload).get<Tbom>();
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"dbom: generate, sign, link, verify and audit decision bills of materials", "dbom"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "machine-readable output");

  // train
  auto* train = app.add_subcommand("train", "train the reference classifier and emit a signed TBOM");
  std::string train_config, train_cas;
  train->add_option("config", train_config, "training config (JSON)")->required();
  train->add_option("--cas", train_cas, "CAS state directory")->required();

  // infer
  auto* infer = app.add_subcommand("infer", "run one inference and emit a signed IBOM");
  std::string infer_model, infer_tbom, infer_input, infer_out, infer_pipeline{kDefaultInferencePipelineId},
      infer_role = "deployer";
  infer->add_option("--model", infer_model, "model artifact")->required();
  infer->add_option("--tbom", infer_tbom, "signed TBOM envelope")->required();
  infer->add_option("--input", infer_input, "feature map (JSON)")->required();
  infer->add_option("--out", infer_out, "IBOM envelope output path");
  infer->add_option("--pipeline-id", infer_pipeline, "inference pipeline identifier");
  infer->add_option("--role", infer_role, "role identity for the signing key");
  RegistryArgs infer_reg;
  infer_reg.attach(infer);

  // verify
  auto* verify_cmd = app.add_subcommand("verify", "integrity-check a BOM envelope");
  std::string verify_path, verify_kind;
  verify_cmd->add_option("envelope", verify_path, "envelope file")->required();
  verify_cmd->add_option("--kind", verify_kind, "expected kind: tbom or ibom");
  RegistryArgs verify_reg;
  verify_reg.attach(verify_cmd);

  // chain
  auto* chain = app.add_subcommand("chain", "check that an IBOM descends from a TBOM");
  std::string chain_ibom, chain_tbom;
  chain->add_option("ibom", chain_ibom, "IBOM envelope")->required();
  chain->add_option("tbom", chain_tbom, "TBOM envelope")->required();
  RegistryArgs chain_reg;
  chain_reg.attach(chain);

  // comply
  auto* comply = app.add_subcommand("comply", "evaluate compliance rules against a BOM envelope");
  std::string comply_bom, comply_rules;
  comply->add_option("bom", comply_bom, "BOM envelope")->required();
  comply->add_option("--rules", comply_rules, "rule file")->required();
  RegistryArgs comply_reg;
  comply_reg.attach(comply);

  // vigilance
  auto* vig = app.add_subcommand("vigilance", "submit BOMs to or scan a vigilance log");
  vig->require_subcommand(1);
  auto* submit = vig->add_subcommand("submit", "append an envelope to the log");
  std::string submit_path, submit_log;
  submit->add_option("envelope", submit_path, "envelope file")->required();
  submit->add_option("--log", submit_log, "vigilance log (JSON lines)")->required();
  RegistryArgs submit_reg;
  submit_reg.attach(submit);
  auto* scan = vig->add_subcommand("scan", "report findings over the log");
  std::string scan_log, drift_text = "0.02", rate_text = "0.30";
  std::uint64_t window = 50;
  scan->add_option("--log", scan_log, "vigilance log (JSON lines)")->required();
  scan->add_option("--drift-threshold", drift_text, "accuracy drop that counts as drift");
  scan->add_option("--low-certainty-rate", rate_text, "share of low-certainty decisions that is flagged");
  scan->add_option("--window", window, "trailing IBOMs per key considered");

  // cas
  auto* cas = app.add_subcommand("cas", "simulated attestation service");
  cas->require_subcommand(1);
  auto* cas_init = cas->add_subcommand("init", "create CAS state");
  std::string cas_dir;
  std::vector<std::string> cas_allow_list;
  cas_init->add_option("--cas", cas_dir, "CAS state directory")->required();
  cas_init->add_option("--allow", cas_allow_list, "measurement to allowlist");
  auto* cas_allow = cas->add_subcommand("allow", "allowlist a measurement");
  std::string allow_hex;
  cas_allow->add_option("measurement", allow_hex, "64-char hex")->required();
  cas_allow->add_option("--cas", cas_dir, "CAS state directory")->required();
  auto* cas_measure = cas->add_subcommand("measure", "print the measurement of a pipeline");
  std::string measure_config, measure_model, measure_tbom, measure_pipeline_id;
  cas_measure->add_option("--config", measure_config, "training config");
  cas_measure->add_option("--model", measure_model, "model artifact (inference pipeline)");
  cas_measure->add_option("--tbom", measure_tbom, "TBOM envelope (inference pipeline)");
  cas_measure->add_option("--pipeline-id", measure_pipeline_id, "pipeline identifier");
  auto* cas_issue = cas->add_subcommand("issue", "issue a signing key and publish its verifying key");
  std::string issue_measurement, issue_role = "model-provider";
  cas_issue->add_option("--cas", cas_dir, "CAS state directory")->required();
  cas_issue->add_option("--measurement", issue_measurement, "64-char hex")->required();
  cas_issue->add_option("--role", issue_role, "role identity");
  auto* cas_keys = cas->add_subcommand("keys", "list published key records");
  cas_keys->add_option("--cas", cas_dir, "CAS state directory")->required();

  // serve
  auto* serve = app.add_subcommand("serve", "serve the HTTP API for one model");
  std::string serve_config;
  serve->add_option("config", serve_config, "service config (JSON)")->required();

  if (!args.empty() && !args.front().empty() && args.front().front() != '-') {
    bool known = false;
    for (const auto* sub : app.get_subcommands({})) known = known || sub->get_name() == args.front();
    if (!known) {
      err << "error: unknown subcommand '" << args.front() << "'\n\n" << app.help();
      return kExitUsage;
    }
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  Printer p(out, as_json);
  try {
    if (train->parsed()) {
      auto authority = KeyAuthority::open_state_dir(train_cas);
      auto r = run_training_job(train_config, *authority);
      const auto link = tbom_link_digest(r.tbom);
      const auto& m = r.tbom.performance_metrics;
      json j = {{"model_path", r.model_path.string()},
                {"tbom_path", r.tbom_path.string()},
                {"model_digest", r.tbom.output_artifacts.model_digest.hex()},
                {"tbom_link", link.hex()},
                {"keyid", r.key.keyid},
                {"measurement", r.tbom.measurement.hex()},
                {"cv_mean_accuracy", m.cv.mean_accuracy.to_string()},
                {"final_test", m.final_test}};
      std::ostringstream s;
      s << "model  " << r.model_path.string() << "\n"
        << "tbom   " << r.tbom_path.string() << "\n"
        << "model digest " << r.tbom.output_artifacts.model_digest.hex() << "\n"
        << "tbom link    " << link.hex() << "\n"
        << "signed by    " << r.key.keyid << "\n"
        << "cv mean accuracy    " << m.cv.mean_accuracy.to_string() << "\n"
        << "final test accuracy " << m.final_test.accuracy.to_string() << "\n";
      p.emit(j, s.str());
      return kExitPass;
    }

    if (infer->parsed()) {
      if (infer_reg.cas.empty()) throw Error(ErrorCode::kConfig, "infer needs --cas to obtain a signing key");
      auto authority = KeyAuthority::open_state_dir(infer_reg.cas);
      std::string tbom_keyid;
      Tbom tbom = verified_tbom(read_file(infer_tbom), *authority, tbom_keyid, p);
      InferenceEngine engine(read_file(infer_model), std::move(tbom));
      auto issued = authority->issue_signing_key(engine.measurement(infer_pipeline), infer_role);
      auto result = engine.run(read_file(infer_input), *authority, issued.first);
      fs::path out_path = infer_out.empty()
                              ? fs::path("ibom-" + result.ibom.inference_identification.inference_id + ".dbom.json")
                              : fs::path(infer_out);
      const auto summary = decision_summary(result.ibom);
      write_file(out_path, serialize_envelope(result.envelope));
      write_file(summary_path_for(out_path), summary);
      json j = {{"ibom_path", out_path.string()},
                {"summary_path", summary_path_for(out_path).string()},
                {"inference_id", result.ibom.inference_identification.inference_id},
                {"decision", result.ibom.prediction.decision},
                {"probability_poisonous", result.ibom.prediction.probability_poisonous.to_string()},
                {"certainty", std::string(to_string(result.ibom.prediction.certainty))},
                {"keyid", issued.second.keyid}};
      p.emit(j, summary + "ibom   " + out_path.string() + "\n");
      return kExitPass;
    }

    if (verify_cmd->parsed()) {
      auto registry = verify_reg.open();
      auto report = integrity_check(read_file(verify_path), *registry, parse_kind(verify_kind));
      p.emit(json(report), integrity_text(report, verify_path));
      return report.pass() ? kExitPass : kExitCheckFailed;
    }

    if (chain->parsed()) {
      auto registry = chain_reg.open();
      auto ir = integrity_check(read_file(chain_ibom), *registry, BomKind::kIbom);
      auto tr = integrity_check(read_file(chain_tbom), *registry, BomKind::kTbom);
      if (!ir.pass() || !tr.pass()) {
        json j = {{"pass", false}, {"stage", "integrity"}, {"ibom", json(ir)}, {"tbom", json(tr)}};
        std::string text;
        if (!ir.pass()) text += integrity_text(ir, chain_ibom) + "\n";
        if (!tr.pass()) text += integrity_text(tr, chain_tbom) + "\n";
        p.emit(j, text);
        return kExitCheckFailed;
      }
      Ibom ibom = parse_json(ir.payload).get<Ibom>();
      Tbom tbom = parse_json(tr.payload).get<Tbom>();
      auto key = registry->find(*tr.keyid_used);
      auto result = chain_check(ibom, tbom, *key);
      json j = {{"pass", result.pass()}, {"verdict", std::string(to_string(result.verdict))}, {"reason", result.reason}};
      p.emit(j, (result.pass() ? "PASS " : "FAIL ") + std::string(to_string(result.verdict)) + ": " + result.reason);
      return result.pass() ? kExitPass : kExitCheckFailed;
    }

    if (comply->parsed()) {
      auto rules = compile_rules(read_file(comply_rules));
      auto registry = comply_reg.open();
      auto report = integrity_check(read_file(comply_bom), *registry);
      if (!report.pass()) {
        p.emit({{"pass", false}, {"stage", "integrity"}, {"integrity", json(report)}},
               integrity_text(report, comply_bom));
        return kExitCheckFailed;
      }
      auto result = compliance_check(parse_json(report.payload), rules);
      std::ostringstream s;
      if (result.pass()) {
        s << "PASS " << rules.rules.size() << " rule(s)";
      } else {
        s << "FAIL " << result.violations.size() << " of " << rules.rules.size() << " rule(s) violated\n";
        for (const auto& v : result.violations) s << "  " << v.rule << "  (observed " << v.observed << ")\n";
      }
      p.emit(json(result), s.str());
      return result.pass() ? kExitPass : kExitCheckFailed;
    }

    if (submit->parsed()) {
      auto registry = submit_reg.open();
      VigilanceLog log(submit_log);
      auto receipt = log.submit(read_file(submit_path), *registry);
      std::ostringstream s;
      s << "sequence " << receipt.sequence << (receipt.accepted ? " accepted" : " rejected")
        << (receipt.duplicate ? " (duplicate)" : "");
      if (!receipt.accepted) s << ": " << receipt.reason;
      p.emit(json(receipt), s.str());
      return receipt.accepted ? kExitPass : kExitCheckFailed;
    }

    if (scan->parsed()) {
      VigilancePolicy policy;
      auto drift = Decimal::parse_lenient(drift_text);
      auto rate = Decimal::parse_lenient(rate_text);
      if (!drift || !rate) throw Error(ErrorCode::kConfig, "thresholds must be decimal numbers");
      policy.drift_threshold = *drift;
      policy.low_certainty_rate = *rate;
      policy.window = window;
      auto findings = vigilance_scan(VigilanceLog(scan_log).entries(), policy);
      std::ostringstream s;
      if (findings.empty()) s << "no findings";
      for (const auto& f : findings) {
        s << f.kind << " " << f.subject << " [" << f.from_seq << ".." << f.to_seq << "] " << f.detail << "\n";
      }
      p.emit({{"findings", findings}}, s.str());
      return findings.empty() ? kExitPass : kExitCheckFailed;
    }

    if (cas_init->parsed()) {
      std::vector<Digest> allow;
      for (const auto& h : cas_allow_list) {
        auto d = Digest::from_hex(h);
        if (!d) throw Error(ErrorCode::kConfig, "not a 64-char lowercase hex digest: " + h);
        allow.push_back(*d);
      }
      KeyAuthority::init_state_dir(cas_dir, allow);
      p.emit({{"cas", cas_dir}, {"allowlist", cas_allow_list}}, "initialised " + cas_dir);
      return kExitPass;
    }

    if (cas_allow->parsed()) {
      auto d = Digest::from_hex(allow_hex);
      if (!d) throw Error(ErrorCode::kConfig, "not a 64-char lowercase hex digest: " + allow_hex);
      KeyAuthority::add_to_state_dir(cas_dir, *d);
      p.emit({{"allowed", allow_hex}}, "allowed " + allow_hex);
      return kExitPass;
    }

    if (cas_measure->parsed()) {
      Digest m;
      if (!measure_config.empty()) {
        if (!measure_model.empty() || !measure_tbom.empty()) {
          throw Error(ErrorCode::kConfig, "use either --config or --model/--tbom");
        }
        const auto bytes = read_file(measure_config);
        auto config = parse_training_config(bytes, fs::path(measure_config).parent_path());
        m = measure_pipeline(bytes, measure_pipeline_id.empty() ? config.pipeline_id : measure_pipeline_id);
      } else if (!measure_model.empty() && !measure_tbom.empty()) {
        auto env = parse_envelope(read_file(measure_tbom));
        auto payload = base64_decode(env.payload);
        if (!payload) throw Error(ErrorCode::kFormat, "tbom payload is not valid base64");
        InferenceEngine engine(read_file(measure_model), parse_json(*payload).get<Tbom>());
        m = engine.measurement(measure_pipeline_id.empty() ? std::string(kDefaultInferencePipelineId)
                                                           : measure_pipeline_id);
      } else {
        throw Error(ErrorCode::kConfig, "cas measure needs --config, or --model and --tbom");
      }
      p.emit({{"measurement", m.hex()}}, m.hex());
      return kExitPass;
    }

    if (cas_issue->parsed()) {
      auto d = Digest::from_hex(issue_measurement);
      if (!d) throw Error(ErrorCode::kConfig, "not a 64-char lowercase hex digest: " + issue_measurement);
      auto authority = KeyAuthority::open_state_dir(cas_dir);
      auto issued = authority->issue_signing_key(*d, issue_role);
      p.emit(json(issued.second), "issued " + issued.second.keyid + " (signing half stays inside this process)");
      return kExitPass;
    }

    if (cas_keys->parsed()) {
      auto authority = KeyAuthority::open_state_dir(cas_dir);
      auto records = authority->records();
      std::ostringstream s;
      for (const auto& r : records) s << r.keyid << " " << r.role_identity << " " << r.bound_measurement.hex() << "\n";
      p.emit({{"keys", records}}, s.str());
      return kExitPass;
    }

    if (serve->parsed()) {
      auto config = parse_service_config(read_file(serve_config), fs::path(serve_config).parent_path());
      DbomService service(config);
      err << "serving on " << config.host << ":" << config.port << " (key " << service.signing_key().keyid << ")\n";
      return service.listen() ? kExitPass : kExitUsage;
    }
  } catch (const Error& e) {
    const bool check = is_check_failure(e.code());
    if (p.json_mode()) {
      out << json({{"error", std::string(to_string(e.code()))}, {"message", e.what()}}).dump(2) << "\n";
    } else {
      err << (check ? "FAIL " : "error: ") << to_string(e.code()) << ": " << e.what() << "\n";
    }
    return check ? kExitCheckFailed : kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace dbom::frontends
