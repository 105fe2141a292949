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

#include "slsa_audit/report.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <tuple>

#include "slsa_audit/error.hpp"
#include "slsa_audit/util.hpp"

namespace slsa::report {

using nlohmann::json;

std::string_view to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::kJson: return "json";
    case OutputFormat::kTable: return "table";
    case OutputFormat::kSarifLike: return "sarif-like";
  }
  return "?";
}

OutputFormat parse_output_format(std::string_view text) {
  if (iequals(text, "json")) return OutputFormat::kJson;
  if (iequals(text, "table")) return OutputFormat::kTable;
  if (iequals(text, "sarif-like") || iequals(text, "sarif")) return OutputFormat::kSarifLike;
  throw Error(ErrorKind::kParse,
              "unknown output format '" + std::string(text) + "' (json, table, sarif-like)");
}

ScanReport aggregate(std::string_view corpus_id, std::span<const FindingBatch> batches,
                     const std::map<ComponentRef, std::uint64_t>& vuln_counts) {
  ScanReport report;
  report.corpus_id = std::string(corpus_id);
  report.vuln_counts = vuln_counts;
  for (const auto& [ref, count] : vuln_counts) report.per_component[ref];

  std::set<std::tuple<std::string, ComponentRef, std::string>> seen;
  for (const auto& batch : batches) {
    if (batch.corpus_id != corpus_id) {
      throw Error(ErrorKind::kConsistency, "finding batch from corpus '" + batch.corpus_id +
                                               "' cannot join report for '" +
                                               std::string(corpus_id) + "'");
    }
    for (const auto& f : batch.findings) {
      if (!seen.emplace(f.rule_id, f.component, f.location).second) continue;
      report.per_component[f.component].push_back(f);
      ++report.severity_histogram[f.severity];
    }
  }
  for (auto& [ref, findings] : report.per_component) {
    std::sort(findings.begin(), findings.end(), finding_less);
  }
  if (!vuln_counts.empty()) {
    std::vector<std::uint64_t> counts;
    for (const auto& [ref, c] : vuln_counts) counts.push_back(c);
    report.stats = summarize_counts(counts);
    report.cdf_points = cdf_of_counts(counts, default_cdf_thresholds(counts));
  }
  return report;
}

std::uint64_t total_findings(const ScanReport& report) {
  std::uint64_t n = 0;
  for (const auto& [ref, findings] : report.per_component) n += findings.size();
  return n;
}

void validate(const AuditRun& run) {
  if (run.enabled_vectors.empty()) {
    throw Error(ErrorKind::kConsistency, "audit run has no enabled attack vector");
  }
  if (run.report.corpus_id != run.corpus_id) {
    throw Error(ErrorKind::kConsistency, "report corpus differs from the run corpus");
  }
  for (const auto& [ref, findings] : run.report.per_component) {
    for (const auto& f : findings) {
      if (!run.enabled_vectors.count(f.vector)) {
        throw Error(ErrorKind::kConsistency, "finding " + f.rule_id + " uses disabled vector " +
                                                 std::string(to_string(f.vector)));
      }
    }
  }
}

// ---------------------------------------------------------------------------
// JSON

namespace {

[[noreturn]] void format_error(const std::string& field, const std::string& why) {
  throw Error(ErrorKind::kFormat, "report field '" + field + "': " + why);
}

const json& field(const json& j, const char* name, const std::string& where) {
  if (!j.is_object() || !j.contains(name)) format_error(where + name, "missing");
  return j.at(name);
}

std::string string_field(const json& j, const char* name, const std::string& where) {
  const json& v = field(j, name, where);
  if (!v.is_string()) format_error(where + name, "expected a string");
  return v.get<std::string>();
}

json finding_to_json(const Finding& f) {
  return json{{"rule_id", f.rule_id},
              {"vector", std::string(to_string(f.vector))},
              {"severity", std::string(to_string(f.severity))},
              {"location", f.location},
              {"evidence", f.evidence},
              {"remediation", f.remediation}};
}

Finding finding_from_json(const json& j, const ComponentRef& ref, const std::string& where) {
  Finding f;
  f.component = ref;
  f.rule_id = string_field(j, "rule_id", where);
  try {
    f.vector = parse_attack_vector(string_field(j, "vector", where));
    f.severity = parse_severity(string_field(j, "severity", where));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kFormat) throw;
    format_error(where + "vector/severity", e.what());
  }
  f.location = string_field(j, "location", where);
  f.evidence = string_field(j, "evidence", where);
  f.remediation = string_field(j, "remediation", where);
  return f;
}

double number_field(const json& j, const char* name, const std::string& where) {
  const json& v = field(j, name, where);
  if (!v.is_number()) format_error(where + name, "expected a number");
  return v.get<double>();
}

}  // namespace

json to_json(const ComponentRef& ref) {
  json j{{"repository", std::string(to_string(ref.repository))},
         {"publisher", ref.publisher},
         {"name", ref.name}};
  if (ref.version) j["version"] = *ref.version;
  return j;
}

ComponentRef component_from_json(const json& j) {
  ComponentRef ref;
  try {
    ref.repository = parse_repository(string_field(j, "repository", "component."));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kFormat) throw;
    format_error("component.repository", e.what());
  }
  ref.publisher = string_field(j, "publisher", "component.");
  ref.name = string_field(j, "name", "component.");
  if (j.contains("version")) ref.version = string_field(j, "version", "component.");
  return ref;
}

json to_json(const ScanReport& report) {
  json j;
  j["corpus_id"] = report.corpus_id;
  json comps = json::array();
  for (const auto& [ref, findings] : report.per_component) {
    json c{{"component", to_json(ref)}, {"findings", json::array()}};
    for (const auto& f : findings) c["findings"].push_back(finding_to_json(f));
    comps.push_back(std::move(c));
  }
  j["per_component"] = std::move(comps);
  json counts = json::array();
  for (const auto& [ref, n] : report.vuln_counts) {
    counts.push_back({{"component", to_json(ref)}, {"count", n}});
  }
  j["vuln_counts"] = std::move(counts);
  json hist = json::object();
  for (const auto& [sev, n] : report.severity_histogram) hist[std::string(to_string(sev))] = n;
  j["severity_histogram"] = std::move(hist);
  if (report.stats) {
    const auto& s = *report.stats;
    j["stats"] = {{"mean", s.mean},     {"median", s.median}, {"min", s.min},
                  {"max", s.max},       {"stddev", s.stddev}};
  } else {
    j["stats"] = nullptr;
  }
  json cdf = json::array();
  for (const auto& p : report.cdf_points) {
    cdf.push_back({{"count_threshold", p.count_threshold}, {"fraction", p.fraction}});
  }
  j["cdf_points"] = std::move(cdf);
  j["total_findings"] = total_findings(report);
  return j;
}

ScanReport report_from_json(const json& j) {
  ScanReport r;
  r.corpus_id = string_field(j, "corpus_id", "");
  const json& comps = field(j, "per_component", "");
  if (!comps.is_array()) format_error("per_component", "expected an array");
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const std::string where = "per_component[" + std::to_string(i) + "].";
    const ComponentRef ref = component_from_json(field(comps[i], "component", where));
    const json& fs = field(comps[i], "findings", where);
    if (!fs.is_array()) format_error(where + "findings", "expected an array");
    auto& list = r.per_component[ref];
    for (std::size_t k = 0; k < fs.size(); ++k) {
      list.push_back(finding_from_json(fs[k], ref, where + "findings[" + std::to_string(k) + "]."));
    }
  }
  const json& counts = field(j, "vuln_counts", "");
  if (!counts.is_array()) format_error("vuln_counts", "expected an array");
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const std::string where = "vuln_counts[" + std::to_string(i) + "].";
    const json& n = field(counts[i], "count", where);
    if (!n.is_number_unsigned()) format_error(where + "count", "expected a non-negative integer");
    r.vuln_counts[component_from_json(field(counts[i], "component", where))] =
        n.get<std::uint64_t>();
  }
  const json& hist = field(j, "severity_histogram", "");
  if (!hist.is_object()) format_error("severity_histogram", "expected an object");
  for (const auto& [key, n] : hist.items()) {
    if (!n.is_number_unsigned()) format_error("severity_histogram." + key, "expected a count");
    try {
      r.severity_histogram[parse_severity(key)] = n.get<std::uint64_t>();
    } catch (const Error& e) {
      format_error("severity_histogram." + key, e.what());
    }
  }
  const json& stats = field(j, "stats", "");
  if (!stats.is_null()) {
    CountStats s;
    s.mean = number_field(stats, "mean", "stats.");
    s.median = number_field(stats, "median", "stats.");
    s.min = number_field(stats, "min", "stats.");
    s.max = number_field(stats, "max", "stats.");
    s.stddev = number_field(stats, "stddev", "stats.");
    r.stats = s;
  }
  const json& cdf = field(j, "cdf_points", "");
  if (!cdf.is_array()) format_error("cdf_points", "expected an array");
  for (std::size_t i = 0; i < cdf.size(); ++i) {
    const std::string where = "cdf_points[" + std::to_string(i) + "].";
    const json& t = field(cdf[i], "count_threshold", where);
    if (!t.is_number_integer()) format_error(where + "count_threshold", "expected an integer");
    r.cdf_points.push_back({t.get<std::int64_t>(), number_field(cdf[i], "fraction", where)});
  }
  return r;
}

ScanReport parse_report(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kFormat, std::string("report is not valid JSON: ") + e.what());
  }
  // Run documents and subcommand outputs carry the report under "report".
  if (j.is_object() && j.contains("report") && j["report"].is_object()) {
    return report_from_json(j["report"]);
  }
  return report_from_json(j);
}

std::string_view sarif_level(Severity s) {
  switch (s) {
    case Severity::kCritical:
    case Severity::kHigh: return "error";
    case Severity::kMedium: return "warning";
    case Severity::kLow: return "note";
    case Severity::kUnknown: return "none";
  }
  return "none";
}

// ---------------------------------------------------------------------------
// Text outputs

namespace {

std::string fixed(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string render_table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    width.resize(std::max(width.size(), row.size()), 0);
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::string out;
  for (const auto& row : rows) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      line += row[c];
      if (c + 1 < row.size()) line += std::string(width[c] - row[c].size() + 2, ' ');
    }
    out += line + "\n";
  }
  return out;
}

std::string table(const ScanReport& report) {
  std::vector<std::vector<std::string>> rows{
      {"Repository", "Components", "Mean", "Median", "Max", "Min", "StdDev"}};
  std::map<Repository, std::vector<std::uint64_t>> by_repo;
  for (const auto& [ref, n] : report.vuln_counts) by_repo[ref.repository].push_back(n);
  for (const auto& [repo, counts] : by_repo) {
    const CountStats s = summarize_counts(counts);
    rows.push_back({std::string(to_string(repo)), std::to_string(counts.size()), fixed(s.mean),
                    fixed(s.median), fixed(s.max), fixed(s.min), fixed(s.stddev)});
  }
  std::string out = render_table(rows);
  if (total_findings(report) == 0) return out;

  std::vector<std::vector<std::string>> frows{
      {"Severity", "Vector", "Rule", "Component", "Location"}};
  for (const auto& [ref, findings] : report.per_component) {
    for (const auto& f : findings) {
      frows.push_back({std::string(to_string(f.severity)), std::string(to_string(f.vector)),
                       f.rule_id, ref.display(), f.location});
    }
  }
  out += "\n" + render_table(frows);
  std::string hist = "\nSeverity:";
  for (auto s : kAllSeverities) {
    const auto it = report.severity_histogram.find(s);
    hist += " " + std::string(to_string(s)) + "=" +
            std::to_string(it == report.severity_histogram.end() ? 0 : it->second);
  }
  return out + hist + "\n";
}

json sarif(const ScanReport& report) {
  std::set<std::string> rule_ids;
  json results = json::array();
  for (const auto& [ref, findings] : report.per_component) {
    for (const auto& f : findings) {
      rule_ids.insert(f.rule_id);
      const auto cut = f.location.find_first_of(":#");
      json phys{{"artifactLocation", {{"uri", f.location.substr(0, cut)}}}};
      if (cut != std::string::npos && f.location[cut] == ':') {
        const std::string rest = f.location.substr(cut + 1);
        const auto digits = rest.find_first_not_of("0123456789");
        if (digits != 0 && !rest.empty()) {
          phys["region"] = {{"startLine", std::stoi(rest.substr(0, digits))}};
        }
      }
      results.push_back({{"ruleId", f.rule_id},
                         {"level", std::string(sarif_level(f.severity))},
                         {"message", {{"text", f.evidence}}},
                         {"locations",
                          json::array({{{"physicalLocation", phys},
                                        {"logicalLocations",
                                         json::array({{{"fullyQualifiedName", f.location}}})}}})},
                         {"properties",
                          {{"component", ref.display()},
                           {"vector", std::string(to_string(f.vector))},
                           {"severity", std::string(to_string(f.severity))},
                           {"remediation", f.remediation}}}});
    }
  }
  json rules = json::array();
  for (const auto& id : rule_ids) rules.push_back({{"id", id}});
  return {{"version", "2.1.0"},
          {"runs", json::array({{{"tool", {{"driver", {{"name", "slsa-audit"}, {"rules", rules}}}}},
                                 {"automationDetails", {{"id", report.corpus_id}}},
                                 {"results", results}}})}};
}

json run_header(const AuditRun& run) {
  json vectors = json::array();
  for (auto v : run.enabled_vectors) vectors.push_back(std::string(to_string(v)));
  json h{{"corpus_id", run.corpus_id},
         {"enabled_vectors", vectors},
         {"tool_versions", run.tool_versions},
         {"notices", run.notices}};
  if (!run.started.empty()) h["started"] = run.started;
  if (!run.finished.empty()) h["finished"] = run.finished;
  return h;
}

}  // namespace

std::string emit(const ScanReport& report, OutputFormat format) {
  switch (format) {
    case OutputFormat::kJson: return to_json(report).dump(2) + "\n";
    case OutputFormat::kTable: return table(report);
    case OutputFormat::kSarifLike: return sarif(report).dump(2) + "\n";
  }
  return "";
}

std::string emit_run(const AuditRun& run, OutputFormat format) {
  switch (format) {
    case OutputFormat::kJson:
      return json{{"run", run_header(run)}, {"report", to_json(run.report)}}.dump(2) + "\n";
    case OutputFormat::kSarifLike: {
      json doc = sarif(run.report);
      doc["runs"][0]["properties"] = run_header(run);
      return doc.dump(2) + "\n";
    }
    case OutputFormat::kTable: {
      std::string out = "Corpus: " + run.corpus_id + "\nVectors:";
      for (auto v : run.enabled_vectors) out += " " + std::string(to_string(v));
      out += "\n";
      if (!run.started.empty()) out += "Started: " + run.started + "\n";
      if (!run.finished.empty()) out += "Finished: " + run.finished + "\n";
      for (const auto& n : run.notices) out += "notice: " + n + "\n";
      return out + "\n" + table(run.report);
    }
  }
  return "";
}

int exit_code_for(const ScanReport& report, std::optional<Severity> fail_on) {
  if (!fail_on) return 0;
  for (const auto& [ref, findings] : report.per_component) {
    for (const auto& f : findings) {
      if (severity_at_least(f.severity, *fail_on)) return 1;
    }
  }
  return 0;
}

}  // namespace slsa::report
