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
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slsa_audit/model.hpp"

namespace slsa::report {

enum class OutputFormat { kJson, kTable, kSarifLike };

std::string_view to_string(OutputFormat f);
// "json", "table", "sarif-like" (or "sarif"). Throws Error(kParse).
OutputFormat parse_output_format(std::string_view text);

struct FindingBatch {
  std::string corpus_id;
  std::vector<Finding> findings;
};

// Merges batches of one corpus. Findings are deduplicated on
// (rule_id, component, location), first occurrence wins. Every component in
// vuln_counts gets an entry, possibly empty. Throws Error(kConsistency) when a
// batch names another corpus.
ScanReport aggregate(std::string_view corpus_id, std::span<const FindingBatch> batches,
                     const std::map<ComponentRef, std::uint64_t>& vuln_counts);

std::uint64_t total_findings(const ScanReport& report);

struct AuditRun {
  std::string corpus_id;
  std::set<AttackVector> enabled_vectors;
  ScanReport report;
  std::map<std::string, std::string> tool_versions;
  // Empty unless the caller asked for timestamps.
  std::string started;
  std::string finished;
  std::vector<std::string> notices;
};

// Throws Error(kConsistency) when no vector is enabled, a finding carries a
// disabled vector, or the report names another corpus.
void validate(const AuditRun& run);

nlohmann::json to_json(const ComponentRef& ref);
ComponentRef component_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ScanReport& report);
// Throws Error(kFormat) naming the offending field.
ScanReport report_from_json(const nlohmann::json& j);
ScanReport parse_report(std::string_view json_text);

// "error", "warning", "note" or "none".
std::string_view sarif_level(Severity s);

std::string emit(const ScanReport& report, OutputFormat format);
// JSON wraps the report with a run header; the other formats add a short
// header block before the report output.
std::string emit_run(const AuditRun& run, OutputFormat format);

// 1 when any finding is at or above fail_on, else 0. nullopt never fails.
int exit_code_for(const ScanReport& report, std::optional<Severity> fail_on);

}  // namespace slsa::report
