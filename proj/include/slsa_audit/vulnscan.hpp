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

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "slsa_audit/model.hpp"
#include "slsa_audit/version.hpp"

namespace slsa::vulnscan {

namespace fs = std::filesystem;

enum class Ecosystem { kNpm, kPypi, kGomod, kOsPackages };

std::string_view to_string(Ecosystem e);
// Accepts our names plus the OSV spellings (PyPI, Go, ...).
Ecosystem parse_ecosystem(std::string_view text);

struct Package {
  std::string name;
  Ecosystem ecosystem = Ecosystem::kNpm;
  // Every declared version; an empty set means the dependency was unpinned
  // and unconstrained, which is reported but never matched.
  std::set<std::string> versions;
  std::set<std::string> declared_in;
  std::set<std::string> referenced_in_source;
};

class PackageInventory {
 public:
  // Merges on (name, ecosystem).
  void add(const std::string& name, Ecosystem eco,
           const std::optional<std::string>& version, const std::string& declared_in);
  void merge(const PackageInventory& other);

  const std::vector<Package>& packages() const { return packages_; }
  std::vector<Package>& packages() { return packages_; }
  bool empty() const { return packages_.empty(); }

 private:
  std::vector<Package> packages_;
};

struct ManifestParse {
  PackageInventory inventory;
  std::vector<std::string> notices;
};

// Recognizes package.json, package-lock.json, requirements.txt, go.mod and
// os-packages.txt by file name. Other files yield an empty inventory and a
// notice. Syntax errors throw ParseError with the line.
ManifestParse parse_manifest(const std::string& path, std::string_view contents);

bool is_manifest_file(std::string_view filename);

// Walks tree_root for supported manifests; paths are recorded relative to it.
ManifestParse collect_inventory(const fs::path& tree_root);

struct ExtensionSets {
  std::set<std::string> source{".py", ".js", ".ts", ".java", ".go",
                               ".rb", ".sh", ".c",  ".cpp"};
  std::set<std::string> metadata{".lock", ".gradle", ".toml", ".yml",
                                 ".yaml", ".json",   ".xml",  ".md"};
};

// True when `text` references `package` in an import-like context.
bool references_package(std::string_view text, const Package& package);

std::vector<std::string> mark_source_references(PackageInventory& inventory,
                                                const fs::path& tree_root,
                                                const ExtensionSets& exts = {});

struct Bound {
  std::string version;
  bool inclusive = true;
};

// Both bounds optional; an absent bound is unbounded.
struct VersionInterval {
  std::optional<Bound> low;
  std::optional<Bound> high;

  bool contains(const Version& v) const;
};

struct Advisory {
  std::string id;
  Ecosystem ecosystem = Ecosystem::kNpm;
  std::string package_name;
  std::vector<VersionInterval> affected;
  // Explicitly listed affected versions (OSV `versions`).
  std::vector<std::string> affected_versions;
  std::optional<double> cvss_score;
  std::string summary;

  bool affects(const Version& v) const;
};

// OSV-subset JSON -> one Advisory per affected package entry.
std::vector<Advisory> parse_osv(std::string_view json_text);
// Every *.json file in dir, sorted by path.
std::vector<Advisory> load_advisory_db(const fs::path& dir);

enum class FpClass { kSourceReferenced, kMetadataOnly };

std::string_view to_string(FpClass c);

struct PackageKey {
  std::string name;
  std::string version;
  Ecosystem ecosystem = Ecosystem::kNpm;

  auto operator<=>(const PackageKey&) const = default;
};

struct VulnMatch {
  std::string advisory_id;
  PackageKey package;
  Severity severity = Severity::kUnknown;
  FpClass fp_class = FpClass::kSourceReferenced;
  // First manifest declaring the package; used as the finding location.
  std::string declared_in;

  bool operator==(const VulnMatch&) const = default;
};

// Read-only index over an advisory list keyed by (ecosystem, name).
class AdvisoryIndex {
 public:
  explicit AdvisoryIndex(std::vector<Advisory> advisories);

  std::span<const Advisory* const> lookup(Ecosystem eco, const std::string& name) const;
  std::size_t size() const { return advisories_.size(); }

 private:
  std::vector<Advisory> advisories_;
  std::map<std::pair<Ecosystem, std::string>, std::vector<const Advisory*>> by_package_;
};

struct MatchResult {
  // Sorted by (package, advisory id); unique on (advisory, package, version).
  std::vector<VulnMatch> matches;
  std::vector<std::string> notices;
};

MatchResult match_advisories(const PackageInventory& inventory, const AdvisoryIndex& db);

struct FpPartition {
  std::vector<VulnMatch> kept;
  std::vector<VulnMatch> suspected_fp;
  double fp_rate = 0;
};

FpPartition filter_false_positives(std::span<const VulnMatch> matches);

double jaccard_similarity(const std::set<std::string>& a, const std::set<std::string>& b);

enum class ExternalFormat { kTrivyJson, kGrypeJson };

ExternalFormat parse_external_format(std::string_view text);

// Component name -> advisory ids. Throws Error(kFormat) naming the field.
std::map<std::string, std::set<std::string>> import_external_scan(
    std::string_view json_text, ExternalFormat format);
std::map<std::string, std::set<std::string>> import_external_scan_file(
    const fs::path& path, ExternalFormat format);

// Turns matches into V1 findings for `component`.
std::vector<Finding> to_findings(std::span<const VulnMatch> matches,
                                 const ComponentRef& component);

}  // namespace slsa::vulnscan
