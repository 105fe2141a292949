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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slsa_audit/archive.hpp"
#include "slsa_audit/dockerlint.hpp"
#include "slsa_audit/iaclint.hpp"
#include "slsa_audit/ingest.hpp"
#include "slsa_audit/model.hpp"
#include "slsa_audit/report.hpp"
#include "slsa_audit/typosquat.hpp"
#include "slsa_audit/vulnscan.hpp"

namespace slsa::pipeline {

namespace fs = std::filesystem;

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kConfigEnvVar = "SLSA_AUDIT_CONFIG";

struct AuditConfig {
  std::set<AttackVector> vectors{std::begin(kAllVectors), std::end(kAllVectors)};
  bool serverless_only = false;

  // V1
  std::optional<fs::path> advisory_dir;
  vulnscan::ExtensionSets extensions;
  bool fp_filter = false;  // drop metadata-only matches from the findings

  // V2
  std::optional<fs::path> signature_db;
  archive::ExtractLimits limits;
  int consensus_threshold = 1;
  int recursion_depth = 2;

  // V3
  docker::DockerRules docker = docker::default_rules();

  // V4
  iac::Catalog iac = iac::default_catalog();

  // V5
  typo::RecordOptions names;
  std::size_t max_distance = 1;
};

// Relative paths in the document resolve against base_dir.
// Throws Error(kConfig).
AuditConfig parse_config_json(std::string_view text, const fs::path& base_dir);
AuditConfig load_config(const fs::path& path);
// explicit_path, else $SLSA_AUDIT_CONFIG, else defaults.
AuditConfig resolve_config(const std::optional<fs::path>& explicit_path);

struct VectorOutput {
  std::vector<Finding> findings;
  std::vector<std::string> notices;
};

// Builtin EICAR plus the configured database; a database entry with id
// "eicar" replaces the builtin one.
std::vector<archive::Signature> load_signatures(const AuditConfig& config,
                                                std::vector<std::string>* notices = nullptr);

// `vuln_count` receives the number of advisory matches before FP filtering.
VectorOutput run_vulnscan(const ingest::CorpusEntry& entry, const vulnscan::AdvisoryIndex& db,
                          const AuditConfig& config, std::uint64_t* vuln_count = nullptr);

// Findings for one scanned archive. `label` replaces the file name in
// member paths.
VectorOutput archive_findings(const archive::ScanResult& scan,
                              std::span<const archive::Signature> signatures, int threshold,
                              const ComponentRef& component, std::string_view label);

VectorOutput run_archives(const ingest::CorpusEntry& entry,
                          std::span<const archive::Signature> signatures,
                          const AuditConfig& config);
VectorOutput run_docker(const ingest::CorpusEntry& entry, const AuditConfig& config);
VectorOutput run_iac(const ingest::CorpusEntry& entry, const AuditConfig& config);

// Near names and identical-name collisions, one finding per side.
VectorOutput typosquat_findings(const typo::NearPairResult& result);
VectorOutput run_typosquat(std::span<const ingest::CorpusEntry> entries,
                           const AuditConfig& config);

// Directory name of the corpus root.
std::string corpus_id_of(const fs::path& root);

// Every enabled vector over every component. Without timestamps the output
// depends only on the inputs.
report::AuditRun scan_all(const fs::path& corpus_root, const AuditConfig& config,
                          bool timestamps = false);

}  // namespace slsa::pipeline
