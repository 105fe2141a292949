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

#include "slsa_audit/vulnscan.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <nlohmann/json.hpp>

#include "slsa_audit/error.hpp"
#include "slsa_audit/util.hpp"

namespace slsa::vulnscan {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Source references

namespace {

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

bool ends_with_keyword(std::string_view before, std::string_view keyword) {
  if (before.size() < keyword.size()) return false;
  if (before.substr(before.size() - keyword.size()) != keyword) return false;
  if (before.size() == keyword.size()) return true;
  return !ident_char(before[before.size() - keyword.size() - 1]) &&
         before[before.size() - keyword.size() - 1] != '.';
}

std::string_view rstrip_blanks(std::string_view s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool import_context(std::string_view before, Ecosystem eco) {
  if (before.empty()) return false;
  const char last = before.back();
  if (last == '\'' || last == '"' || last == '`') {
    std::string_view b = before.substr(0, before.size() - 1);
    if (eco == Ecosystem::kGomod && last == '"') return true;
    if (!b.empty() && b.back() == '(') {
      std::string_view call = rstrip_blanks(b.substr(0, b.size() - 1));
      return ends_with_keyword(call, "require") || ends_with_keyword(call, "import");
    }
    b = rstrip_blanks(b);
    return ends_with_keyword(b, "from") || ends_with_keyword(b, "import");
  }
  if (last != ' ' && last != '\t') return false;
  std::string_view b = rstrip_blanks(before);
  return ends_with_keyword(b, "import") || ends_with_keyword(b, "from");
}

std::vector<std::string> module_tokens(const Package& p) {
  std::vector<std::string> tokens{p.name};
  if (p.ecosystem == Ecosystem::kPypi) {
    std::string underscored = p.name;
    std::replace(underscored.begin(), underscored.end(), '-', '_');
    if (underscored != p.name) tokens.push_back(underscored);
  }
  return tokens;
}

}  // namespace

bool references_package(std::string_view text, const Package& package) {
  for (const auto& token : module_tokens(package)) {
    if (token.empty()) continue;
    std::size_t pos = 0;
    while ((pos = text.find(token, pos)) != std::string_view::npos) {
      const std::size_t end = pos + token.size();
      const bool right_ok = end >= text.size() || !ident_char(text[end]);
      bool ok = false;
      if (right_ok) {
        const std::string_view before = text.substr(0, pos);
        if (package.ecosystem == Ecosystem::kOsPackages) {
          // OS packages are used as commands: whole word, not a path or flag.
          ok = pos == 0 || !(ident_char(text[pos - 1]) || text[pos - 1] == '/' ||
                             text[pos - 1] == '.');
        } else {
          ok = import_context(before, package.ecosystem);
        }
      }
      if (ok) return true;
      pos = end;
    }
  }
  return false;
}

std::vector<std::string> mark_source_references(PackageInventory& inventory,
                                                const fs::path& tree_root,
                                                const ExtensionSets& exts) {
  std::vector<std::string> notices;
  for (const auto& file : list_files_sorted(tree_root)) {
    const std::string ext = to_lower(file.extension().string());
    if (exts.metadata.count(ext) || !exts.source.count(ext)) continue;
    std::string text;
    try {
      text = read_text_file(file);
    } catch (const Error& e) {
      notices.push_back(std::string("skipped unreadable source file: ") + e.what());
      continue;
    }
    const std::string rel = fs::relative(file, tree_root).generic_string();
    for (auto& pkg : inventory.packages()) {
      if (pkg.ecosystem == Ecosystem::kOsPackages && ext != ".sh") continue;
      if (references_package(text, pkg)) pkg.referenced_in_source.insert(rel);
    }
  }
  return notices;
}

// ---------------------------------------------------------------------------
// Advisories

bool VersionInterval::contains(const Version& v) const {
  if (low) {
    auto lv = Version::parse(low->version);
    if (!lv) return false;
    const int c = compare(v, *lv);
    if (c < 0 || (c == 0 && !low->inclusive)) return false;
  }
  if (high) {
    auto hv = Version::parse(high->version);
    if (!hv) return false;
    const int c = compare(v, *hv);
    if (c > 0 || (c == 0 && !high->inclusive)) return false;
  }
  return true;
}

bool Advisory::affects(const Version& v) const {
  for (const auto& listed : affected_versions) {
    auto lv = Version::parse(listed);
    if (lv && compare(*lv, v) == 0) return true;
  }
  return std::any_of(affected.begin(), affected.end(),
                     [&](const VersionInterval& iv) { return iv.contains(v); });
}

namespace {

[[noreturn]] void format_error(const std::string& field, const std::string& what) {
  throw Error(ErrorKind::kFormat, "field '" + field + "': " + what);
}

std::optional<double> parse_score(const json& score, const std::string& field) {
  if (score.is_number()) return score.get<double>();
  if (score.is_string()) {
    const auto s = score.get<std::string>();
    if (s.rfind("CVSS:", 0) == 0) return std::nullopt;  // vector strings are not scored here
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      format_error(field, "score '" + s + "' is not numeric");
    }
    return v;
  }
  format_error(field, "score must be a number or string");
}

std::vector<VersionInterval> parse_events(const json& events, const std::string& field) {
  if (!events.is_array()) format_error(field, "must be an array");
  std::vector<VersionInterval> out;
  std::optional<VersionInterval> open;
  for (const auto& ev : events) {
    if (!ev.is_object() || ev.size() != 1) format_error(field, "each event needs one key");
    const auto& [kind, value] = *ev.items().begin();
    if (!value.is_string()) format_error(field + "." + kind, "must be a string");
    const auto v = value.get<std::string>();
    if (kind == "introduced") {
      if (open) out.push_back(*open);
      open = VersionInterval{};
      if (v != "0") open->low = Bound{v, true};
    } else if (kind == "fixed" || kind == "last_affected") {
      VersionInterval iv = open.value_or(VersionInterval{});
      iv.high = Bound{v, kind == "last_affected"};
      out.push_back(iv);
      open.reset();
    } else if (kind == "limit") {
      continue;
    } else {
      format_error(field, "unknown event '" + kind + "'");
    }
  }
  if (open) out.push_back(*open);
  for (const auto& iv : out) {
    if (iv.low && iv.high) {
      auto a = Version::parse(iv.low->version);
      auto b = Version::parse(iv.high->version);
      if (!a || !b) format_error(field, "unparseable range bound");
      if (compare(*a, *b) > 0) format_error(field, "range low bound exceeds high bound");
    }
  }
  return out;
}

}  // namespace

std::vector<Advisory> parse_osv(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kFormat, std::string("advisory is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) format_error("<root>", "must be an object");
  if (!doc.contains("id") || !doc["id"].is_string() || doc["id"].get<std::string>().empty()) {
    format_error("id", "missing or empty");
  }
  const std::string id = doc["id"].get<std::string>();
  std::string summary;
  if (doc.contains("summary") && doc["summary"].is_string()) summary = doc["summary"];

  std::optional<double> score;
  if (doc.contains("severity")) {
    const auto& sev = doc["severity"];
    if (!sev.is_array()) format_error("severity", "must be an array");
    for (const auto& s : sev) {
      if (!s.is_object() || !s.contains("score")) format_error("severity[].score", "missing");
      if (auto v = parse_score(s["score"], "severity[].score")) {
        score = v;
        break;
      }
    }
  }
  if (!score && doc.contains("database_specific") && doc["database_specific"].is_object() &&
      doc["database_specific"].contains("cvss_score")) {
    score = parse_score(doc["database_specific"]["cvss_score"], "database_specific.cvss_score");
  }
  if (score && (*score < 0.0 || *score > 10.0)) {
    format_error("severity[].score", "outside [0.0, 10.0]");
  }

  if (!doc.contains("affected") || !doc["affected"].is_array()) {
    format_error("affected", "missing or not an array");
  }
  std::vector<Advisory> out;
  for (const auto& aff : doc["affected"]) {
    if (!aff.is_object() || !aff.contains("package") || !aff["package"].is_object()) {
      format_error("affected[].package", "missing");
    }
    const auto& pkg = aff["package"];
    if (!pkg.contains("ecosystem") || !pkg["ecosystem"].is_string()) {
      format_error("affected[].package.ecosystem", "missing");
    }
    if (!pkg.contains("name") || !pkg["name"].is_string()) {
      format_error("affected[].package.name", "missing");
    }
    Advisory adv;
    adv.id = id;
    adv.summary = summary;
    adv.cvss_score = score;
    try {
      adv.ecosystem = parse_ecosystem(pkg["ecosystem"].get<std::string>());
    } catch (const Error& e) {
      format_error("affected[].package.ecosystem", e.what());
    }
    PackageInventory norm;
    norm.add(pkg["name"].get<std::string>(), adv.ecosystem, std::nullopt, "");
    adv.package_name = norm.packages().front().name;
    if (aff.contains("ranges")) {
      if (!aff["ranges"].is_array()) format_error("affected[].ranges", "must be an array");
      for (const auto& r : aff["ranges"]) {
        const std::string type = r.value("type", "SEMVER");
        if (type == "GIT") continue;
        if (!r.contains("events")) format_error("affected[].ranges[].events", "missing");
        auto ivs = parse_events(r["events"], "affected[].ranges[].events");
        adv.affected.insert(adv.affected.end(), ivs.begin(), ivs.end());
      }
    }
    if (aff.contains("versions")) {
      if (!aff["versions"].is_array()) format_error("affected[].versions", "must be an array");
      for (const auto& v : aff["versions"]) {
        if (!v.is_string()) format_error("affected[].versions[]", "must be a string");
        adv.affected_versions.push_back(v.get<std::string>());
      }
    }
    out.push_back(std::move(adv));
  }
  return out;
}

std::vector<Advisory> load_advisory_db(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw Error(ErrorKind::kNotFound, "advisory directory not found: " + dir.string());
  }
  std::vector<Advisory> all;
  for (const auto& file : list_files_sorted(dir)) {
    if (file.extension() != ".json") continue;
    try {
      auto advs = parse_osv(read_text_file(file));
      all.insert(all.end(), advs.begin(), advs.end());
    } catch (const Error& e) {
      throw Error(e.kind(), file.string() + ": " + e.what());
    }
  }
  return all;
}

AdvisoryIndex::AdvisoryIndex(std::vector<Advisory> advisories)
    : advisories_(std::move(advisories)) {
  for (const auto& a : advisories_) {
    by_package_[{a.ecosystem, a.package_name}].push_back(&a);
  }
}

std::span<const Advisory* const> AdvisoryIndex::lookup(Ecosystem eco,
                                                       const std::string& name) const {
  auto it = by_package_.find({eco, name});
  if (it == by_package_.end()) return {};
  return it->second;
}

std::string_view to_string(FpClass c) {
  return c == FpClass::kMetadataOnly ? "MetadataOnly" : "SourceReferenced";
}

MatchResult match_advisories(const PackageInventory& inventory, const AdvisoryIndex& db) {
  MatchResult result;
  std::set<std::tuple<std::string, PackageKey>> seen;
  for (const auto& pkg : inventory.packages()) {
    const auto candidates = db.lookup(pkg.ecosystem, pkg.name);
    if (candidates.empty()) continue;
    const FpClass fp = pkg.referenced_in_source.empty() ? FpClass::kMetadataOnly
                                                        : FpClass::kSourceReferenced;
    for (const auto& version_text : pkg.versions) {
      auto version = Version::parse(version_text);
      if (!version) {
        result.notices.push_back(pkg.name + ": unparseable version '" + version_text +
                                 "', excluded");
        continue;
      }
      if (!version->is_semver()) {
        result.notices.push_back(pkg.name + "@" + version_text +
                                 ": not semver, compared segment-wise");
      }
      for (const Advisory* adv : candidates) {
        if (!adv->affects(*version)) continue;
        PackageKey key{pkg.name, version_text, pkg.ecosystem};
        if (!seen.emplace(adv->id, key).second) continue;
        result.matches.push_back(VulnMatch{adv->id, key, severity_band(adv->cvss_score), fp,
                                           *pkg.declared_in.begin()});
      }
    }
  }
  std::sort(result.matches.begin(), result.matches.end(),
            [](const VulnMatch& a, const VulnMatch& b) {
              return std::tie(a.package, a.advisory_id) < std::tie(b.package, b.advisory_id);
            });
  return result;
}

FpPartition filter_false_positives(std::span<const VulnMatch> matches) {
  FpPartition out;
  for (const auto& m : matches) {
    (m.fp_class == FpClass::kMetadataOnly ? out.suspected_fp : out.kept).push_back(m);
  }
  out.fp_rate = matches.empty() ? 0.0
                                : static_cast<double>(out.suspected_fp.size()) /
                                      static_cast<double>(matches.size());
  return out;
}

double jaccard_similarity(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& x : a) inter += b.count(x);
  const std::size_t uni = a.size() + b.size() - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

// ---------------------------------------------------------------------------
// External scanner reports

ExternalFormat parse_external_format(std::string_view text) {
  if (text == "trivy-json" || text == "trivy") return ExternalFormat::kTrivyJson;
  if (text == "grype-json" || text == "grype") return ExternalFormat::kGrypeJson;
  throw Error(ErrorKind::kFormat, "unknown scanner format '" + std::string(text) + "'");
}

namespace {

const std::string& require_string(const json& obj, const std::string& key,
                                  const std::string& field) {
  if (!obj.is_object() || !obj.contains(key) || !obj[key].is_string()) {
    format_error(field, "missing or not a string");
  }
  return obj[key].get_ref<const std::string&>();
}

void import_trivy_report(const json& report, std::map<std::string, std::set<std::string>>& out) {
  const std::string& component = require_string(report, "ArtifactName", "ArtifactName");
  auto& ids = out[component];
  const auto& results = report["Results"];
  if (results.is_null()) return;
  if (!results.is_array()) format_error("Results", "must be an array");
  for (const auto& r : results) {
    if (!r.is_object()) format_error("Results[]", "must be an object");
    if (!r.contains("Vulnerabilities") || r["Vulnerabilities"].is_null()) continue;
    if (!r["Vulnerabilities"].is_array()) {
      format_error("Results[].Vulnerabilities", "must be an array");
    }
    for (const auto& v : r["Vulnerabilities"]) {
      ids.insert(require_string(v, "VulnerabilityID", "Results[].Vulnerabilities[].VulnerabilityID"));
    }
  }
}

void import_grype_report(const json& report, std::map<std::string, std::set<std::string>>& out) {
  std::string component;
  if (report.contains("source") && report["source"].is_object() &&
      report["source"].contains("target")) {
    const auto& target = report["source"]["target"];
    if (target.is_string()) component = target.get<std::string>();
    else if (target.is_object() && target.contains("userInput") && target["userInput"].is_string())
      component = target["userInput"].get<std::string>();
  }
  if (component.empty()) format_error("source.target.userInput", "missing or not a string");
  auto& ids = out[component];
  const auto& matches = report["matches"];
  if (!matches.is_array()) format_error("matches", "must be an array");
  for (const auto& m : matches) {
    if (!m.is_object() || !m.contains("vulnerability")) {
      format_error("matches[].vulnerability", "missing");
    }
    ids.insert(require_string(m["vulnerability"], "id", "matches[].vulnerability.id"));
  }
}

}  // namespace

std::map<std::string, std::set<std::string>> import_external_scan(std::string_view json_text,
                                                                  ExternalFormat format) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kFormat, std::string("scanner report is not valid JSON: ") + e.what());
  }
  std::map<std::string, std::set<std::string>> out;
  const bool trivy = format == ExternalFormat::kTrivyJson;
  const char* id_key = trivy ? "VulnerabilityID" : "id";
  const char* comp_key = trivy ? "ArtifactName" : "component";

  const auto import_one = [&](const json& item) {
    if (trivy && item.is_object() && item.contains("Results")) {
      import_trivy_report(item, out);
    } else if (!trivy && item.is_object() && item.contains("matches")) {
      import_grype_report(item, out);
    } else {
      const std::string& comp = require_string(item, comp_key, std::string("[].") + comp_key);
      out[comp].insert(require_string(item, id_key, std::string("[].") + id_key));
    }
  };
  if (doc.is_array()) {
    for (const auto& item : doc) import_one(item);
  } else if (doc.is_object()) {
    import_one(doc);
  } else {
    format_error("<root>", "must be an array or object");
  }
  return out;
}

std::map<std::string, std::set<std::string>> import_external_scan_file(const fs::path& path,
                                                                       ExternalFormat format) {
  return import_external_scan(read_text_file(path), format);
}

std::vector<Finding> to_findings(std::span<const VulnMatch> matches,
                                 const ComponentRef& component) {
  std::vector<Finding> out;
  for (const auto& m : matches) {
    Finding f;
    f.rule_id = m.advisory_id;
    f.vector = AttackVector::kV1;
    f.severity = m.severity;
    f.component = component;
    f.location = m.declared_in + "#" + m.package.name + "@" + m.package.version;
    f.evidence = m.package.name + "@" + m.package.version + " (" +
                 std::string(to_string(m.package.ecosystem)) + ")";
    if (m.fp_class == FpClass::kMetadataOnly) f.evidence += " [metadata-only]";
    f.remediation = "Upgrade " + m.package.name + " to a version outside the affected range of " +
                    m.advisory_id + ".";
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace slsa::vulnscan
