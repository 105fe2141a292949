// Copyright 2026 The slsa-audit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "slsa_audit/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <map>
#include <nlohmann/json.hpp>

#include "slsa_audit/error.hpp"
#include "slsa_audit/util.hpp"

namespace slsa::pipeline {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& msg) {
  throw Error(ErrorKind::kConfig, "config: " + msg);
}

void expect_object(const json& j, const std::string& what) {
  if (!j.is_object()) config_error(what + " must be an object");
}

fs::path resolve_path(const json& v, const fs::path& base, const std::string& what) {
  if (!v.is_string()) config_error(what + " must be a path string");
  fs::path p = v.get<std::string>();
  return p.is_absolute() ? p : base / p;
}

std::set<std::string> string_set(const json& v, const std::string& what) {
  if (!v.is_array()) config_error(what + " must be an array of strings");
  std::set<std::string> out;
  for (const auto& s : v) {
    if (!s.is_string()) config_error(what + " must be an array of strings");
    out.insert(s.get<std::string>());
  }
  return out;
}

template <typename T>
T number(const json& v, const std::string& what) {
  if (!v.is_number()) config_error(what + " must be a number");
  return v.get<T>();
}

bool boolean(const json& v, const std::string& what) {
  if (!v.is_boolean()) config_error(what + " must be true or false");
  return v.get<bool>();
}

}  // namespace

AuditConfig parse_config_json(std::string_view text, const fs::path& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    config_error(std::string("not valid JSON: ") + e.what());
  }
  expect_object(j, "top level");
  AuditConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "vectors") {
      cfg.vectors.clear();
      for (const auto& v : string_set(value, key)) {
        try {
          cfg.vectors.insert(parse_attack_vector(v));
        } catch (const Error& e) {
          config_error(e.what());
        }
      }
      if (cfg.vectors.empty()) config_error("vectors must not be empty");
    } else if (key == "ingest") {
      expect_object(value, key);
      for (const auto& [k, v] : value.items()) {
        if (k != "serverless_only") config_error("unknown ingest key '" + k + "'");
        cfg.serverless_only = boolean(v, k);
      }
    } else if (key == "vulnscan") {
      expect_object(value, key);
      for (const auto& [k, v] : value.items()) {
        if (k == "advisories") {
          cfg.advisory_dir = resolve_path(v, base_dir, k);
        } else if (k == "source_extensions") {
          cfg.extensions.source = string_set(v, k);
        } else if (k == "metadata_extensions") {
          cfg.extensions.metadata = string_set(v, k);
        } else if (k == "fp_filter") {
          cfg.fp_filter = boolean(v, k);
        } else {
          config_error("unknown vulnscan key '" + k + "'");
        }
      }
    } else if (key == "archive") {
      expect_object(value, key);
      for (const auto& [k, v] : value.items()) {
        if (k == "signatures") {
          cfg.signature_db = resolve_path(v, base_dir, k);
        } else if (k == "max_ratio") {
          cfg.limits.max_ratio = number<double>(v, k);
          if (cfg.limits.max_ratio <= 0) config_error("max_ratio must be positive");
        } else if (k == "max_output_bytes") {
          if (!v.is_number_unsigned()) config_error("max_output_bytes must be a positive integer");
          cfg.limits.max_output_bytes = v.get<std::uint64_t>();
        } else if (k == "threshold") {
          cfg.consensus_threshold = number<int>(v, k);
          if (cfg.consensus_threshold < 1) config_error("threshold must be at least 1");
        } else if (k == "depth") {
          cfg.recursion_depth = number<int>(v, k);
          if (cfg.recursion_depth < 0) config_error("depth must not be negative");
        } else {
          config_error("unknown archive key '" + k + "'");
        }
      }
    } else if (key == "docker") {
      cfg.docker = value.is_string() ? docker::load_rules(resolve_path(value, base_dir, key))
                                     : docker::parse_rules_json(value.dump());
    } else if (key == "iac") {
      cfg.iac = value.is_string() ? iac::load_catalog(resolve_path(value, base_dir, key))
                                  : iac::parse_catalog_json(value.dump());
    } else if (key == "typosquat") {
      expect_object(value, key);
      for (const auto& [k, v] : value.items()) {
        if (k == "max_distance") {
          if (!v.is_number_unsigned() || v.get<std::size_t>() == 0) {
            config_error("max_distance must be a positive integer");
          }
          cfg.max_distance = v.get<std::size_t>();
        } else if (k == "lowercase") {
          cfg.names.normalize.lowercase = boolean(v, k);
        } else if (k == "strip_namespace") {
          cfg.names.normalize.strip_namespace = boolean(v, k);
        } else if (k == "include_aws_sar") {
          cfg.names.include_aws_sar = boolean(v, k);
        } else {
          config_error("unknown typosquat key '" + k + "'");
        }
      }
    } else {
      config_error("unknown key '" + key + "'");
    }
  }
  return cfg;
}

AuditConfig load_config(const fs::path& path) {
  return parse_config_json(read_text_file(path), path.parent_path());
}

AuditConfig resolve_config(const std::optional<fs::path>& explicit_path) {
  if (explicit_path) return load_config(*explicit_path);
  if (const char* env = std::getenv(kConfigEnvVar); env && *env) return load_config(env);
  return AuditConfig{};
}

std::vector<archive::Signature> load_signatures(const AuditConfig& config,
                                                std::vector<std::string>* notices) {
  std::vector<archive::Signature> sigs;
  if (config.signature_db) {
    auto db = archive::load_signature_db(*config.signature_db);
    if (notices) notices->insert(notices->end(), db.notices.begin(), db.notices.end());
    sigs = std::move(db.signatures);
  }
  const bool has_eicar = std::any_of(sigs.begin(), sigs.end(),
                                     [](const archive::Signature& s) { return s.id == "eicar"; });
  if (!has_eicar) {
    auto builtin = archive::builtin_signatures();
    sigs.insert(sigs.begin(), builtin.begin(), builtin.end());
  }
  return sigs;
}

VectorOutput run_vulnscan(const ingest::CorpusEntry& entry, const vulnscan::AdvisoryIndex& db,
                          const AuditConfig& config, std::uint64_t* vuln_count) {
  VectorOutput out;
  auto inv = vulnscan::collect_inventory(entry.tree_dir());
  out.notices = std::move(inv.notices);
  auto refs = vulnscan::mark_source_references(inv.inventory, entry.tree_dir(), config.extensions);
  out.notices.insert(out.notices.end(), refs.begin(), refs.end());
  auto matched = vulnscan::match_advisories(inv.inventory, db);
  out.notices.insert(out.notices.end(), matched.notices.begin(), matched.notices.end());
  if (vuln_count) *vuln_count = matched.matches.size();
  if (config.fp_filter) {
    const auto part = vulnscan::filter_false_positives(matched.matches);
    if (!part.suspected_fp.empty()) {
      out.notices.push_back(std::to_string(part.suspected_fp.size()) +
                            " metadata-only matches left out by the false-positive filter");
    }
    out.findings = vulnscan::to_findings(part.kept, entry.ref);
  } else {
    out.findings = vulnscan::to_findings(matched.matches, entry.ref);
  }
  return out;
}

VectorOutput archive_findings(const archive::ScanResult& scan,
                              std::span<const archive::Signature> signatures, int threshold,
                              const ComponentRef& component, std::string_view label) {
  VectorOutput out;
  auto relabel = [&](const std::string& path) {
    const auto bang = path.find('!');
    return std::string(label) + (bang == std::string::npos ? "" : path.substr(bang));
  };
  const auto verdicts = archive::engine_verdicts(scan, signatures);
  const auto consensus = archive::consensus_flag(verdicts, threshold);
  if (!scan.matches.empty()) {
    std::set<std::string> ids;
    for (const auto& m : scan.matches) ids.insert(m.signature_id);
    std::string sig_list;
    for (const auto& id : ids) sig_list += (sig_list.empty() ? "" : ", ") + id;
    const std::string evidence = "signatures " + sig_list + "; " +
                                 std::to_string(consensus.engines_flagging) + " of " +
                                 std::to_string(verdicts.size()) + " engines flag (threshold " +
                                 std::to_string(threshold) + ")";
    if (consensus.malicious) {
      out.findings.push_back({"ARCHIVE-MALWARE", AttackVector::kV2, Severity::kCritical, component,
                              relabel(scan.matches.front().path), evidence,
                              "Remove the component or the flagged member and rebuild the "
                              "artifact from reviewed sources."});
    } else {
      out.findings.push_back({"ARCHIVE-SIGNATURE-BELOW-THRESHOLD", AttackVector::kV2,
                              Severity::kLow, component, relabel(scan.matches.front().path),
                              evidence, "Review the flagged member manually."});
    }
  }
  for (const auto& p : scan.problems) {
    if (p.kind == ErrorKind::kSecurity) {
      out.findings.push_back({"ARCHIVE-PATH-TRAVERSAL", AttackVector::kV2, Severity::kHigh,
                              component, relabel(p.path), p.message,
                              "Rebuild the archive with relative member paths only."});
    } else if (p.kind == ErrorKind::kBomb) {
      out.findings.push_back({"ARCHIVE-BOMB", AttackVector::kV2, Severity::kHigh, component,
                              relabel(p.path), p.message,
                              "Do not unpack the archive; its expansion exceeds the limits."});
    } else {
      out.notices.push_back(relabel(p.path) + ": " + p.message);
    }
  }
  if (scan.encrypted) {
    out.findings.push_back({"ARCHIVE-ENCRYPTED", AttackVector::kV2, Severity::kLow, component,
                            std::string(label), "encrypted content could not be scanned",
                            "Ask the publisher for an unencrypted artifact or scan it after "
                            "decryption."});
  }
  for (const auto& n : scan.notices) out.notices.push_back(std::string(label) + ": " + n);
  return out;
}

VectorOutput run_archives(const ingest::CorpusEntry& entry,
                          std::span<const archive::Signature> signatures,
                          const AuditConfig& config) {
  VectorOutput out;
  const fs::path dir = entry.archives_dir();
  for (const auto& path : list_files_sorted(dir)) {
    const std::string label = "archives/" + fs::relative(path, dir).generic_string();
    const auto scan =
        archive::scan_archive_file(path, signatures, config.recursion_depth, config.limits);
    auto part = archive_findings(scan, signatures, config.consensus_threshold, entry.ref, label);
    out.findings.insert(out.findings.end(), part.findings.begin(), part.findings.end());
    out.notices.insert(out.notices.end(), part.notices.begin(), part.notices.end());
  }
  return out;
}

VectorOutput run_docker(const ingest::CorpusEntry& entry, const AuditConfig& config) {
  VectorOutput out;
  const fs::path file = entry.run_commands_path();
  if (!fs::exists(file)) return out;
  auto lint = docker::lint_text(read_text_file(file), config.docker, entry.ref);
  out.findings = std::move(lint.findings);
  out.notices = std::move(lint.notices);
  return out;
}

VectorOutput run_iac(const ingest::CorpusEntry& entry, const AuditConfig& config) {
  VectorOutput out;
  for (auto& r : iac::lint_directory(entry.iac_dir(), config.iac, entry.ref)) {
    out.findings.insert(out.findings.end(), r.findings.begin(), r.findings.end());
    out.notices.insert(out.notices.end(), r.notices.begin(), r.notices.end());
    if (r.error) out.notices.push_back(*r.error);
  }
  return out;
}

VectorOutput typosquat_findings(const typo::NearPairResult& result) {
  VectorOutput out;
  auto both_sides = [&](const typo::NearPair& p, const char* rule, const std::string& relation) {
    const std::string kind(typo::to_string(p.a.kind));
    for (int side = 0; side < 2; ++side) {
      const auto& self = side == 0 ? p.a : p.b;
      const auto& other = side == 0 ? p.b : p.a;
      out.findings.push_back(
          {rule, AttackVector::kV5, Severity::kLow, self.owner,
           "names/" + kind + "/" + self.name + "~" + other.name + "@" + other.owner.display(),
           kind + " '" + self.name + "' " + relation + " '" + other.name + "' of " +
               other.owner.display(),
           "Check that the component is the one intended before pulling it."});
    }
  };
  for (const auto& p : result.pairs) {
    both_sides(p, "TYPO-NEAR-NAME", "is at edit distance " + std::to_string(p.distance) + " from");
  }
  for (const auto& p : result.collisions) both_sides(p, "TYPO-NAME-COLLISION", "is identical to");
  return out;
}

VectorOutput run_typosquat(std::span<const ingest::CorpusEntry> entries,
                           const AuditConfig& config) {
  std::vector<ComponentRef> refs;
  for (const auto& e : entries) refs.push_back(e.ref);
  const auto records = typo::records_from_components(refs, config.names);
  return typosquat_findings(typo::find_near_pairs(records, config.max_distance));
}

std::string corpus_id_of(const fs::path& root) {
  fs::path p = fs::weakly_canonical(root);
  if (p.filename().empty()) p = p.parent_path();
  return p.filename().string();
}

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void append(VectorOutput& part, std::vector<Finding>& findings, std::vector<std::string>& notices,
            const std::string& prefix) {
  findings.insert(findings.end(), part.findings.begin(), part.findings.end());
  for (auto& n : part.notices) notices.push_back(prefix + n);
}

}  // namespace

report::AuditRun scan_all(const fs::path& corpus_root, const AuditConfig& config,
                          bool timestamps) {
  report::AuditRun run;
  run.corpus_id = corpus_id_of(corpus_root);
  run.enabled_vectors = config.vectors;
  run.tool_versions = {{"slsa-audit", kToolVersion}};
  if (timestamps) run.started = utc_now();

  auto load = ingest::load_corpus(corpus_root);
  for (const auto& e : load.errors) {
    run.notices.push_back(e.path.generic_string() + ":" + std::to_string(e.line) + ": " +
                          e.message);
  }
  std::vector<ingest::CorpusEntry> entries;
  for (auto& e : load.entries) {
    if (!config.serverless_only || ingest::is_serverless(e)) entries.push_back(std::move(e));
  }

  const bool v1 = config.vectors.count(AttackVector::kV1) > 0;
  std::optional<vulnscan::AdvisoryIndex> db;
  if (v1) {
    std::vector<vulnscan::Advisory> advisories;
    if (config.advisory_dir) {
      advisories = vulnscan::load_advisory_db(*config.advisory_dir);
    } else {
      run.notices.push_back("no advisory database configured; V1 matches nothing");
    }
    db.emplace(std::move(advisories));
  }
  std::vector<archive::Signature> signatures;
  if (config.vectors.count(AttackVector::kV2)) signatures = load_signatures(config, &run.notices);

  std::vector<Finding> findings;
  std::map<ComponentRef, std::uint64_t> counts;
  for (const auto& e : entries) {
    const std::string prefix = e.ref.display() + ": ";
    if (v1) {
      std::uint64_t n = 0;
      auto part = run_vulnscan(e, *db, config, &n);
      counts[e.ref] = n;
      append(part, findings, run.notices, prefix);
    }
    if (config.vectors.count(AttackVector::kV2)) {
      auto part = run_archives(e, signatures, config);
      append(part, findings, run.notices, prefix);
    }
    if (config.vectors.count(AttackVector::kV3)) {
      auto part = run_docker(e, config);
      append(part, findings, run.notices, prefix);
    }
    if (config.vectors.count(AttackVector::kV4)) {
      auto part = run_iac(e, config);
      append(part, findings, run.notices, prefix);
    }
  }
  if (config.vectors.count(AttackVector::kV5) && !entries.empty()) {
    auto part = run_typosquat(entries, config);
    append(part, findings, run.notices, "typosquat: ");
  }

  const report::FindingBatch batch{run.corpus_id, std::move(findings)};
  run.report = report::aggregate(run.corpus_id, std::span(&batch, 1), counts);
  if (timestamps) run.finished = utc_now();
  report::validate(run);
  return run;
}

}  // namespace slsa::pipeline
