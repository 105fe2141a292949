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

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace slsa {

enum class Repository {
  kDockerHub,
  kGitHub,
  kAwsSar,
  kServerlessFramework,
  kRedHatQuay,
  kLocalCorpus,
};

std::string_view to_string(Repository repo);
// Case-insensitive; throws Error(kParse) on unknown names.
Repository parse_repository(std::string_view text);

struct ComponentRef {
  Repository repository = Repository::kLocalCorpus;
  std::string publisher;
  std::string name;
  std::optional<std::string> version;

  // "<publisher>/<name>[:<version>]@<repository>"
  std::string display() const;

  auto operator<=>(const ComponentRef&) const = default;
  bool operator==(const ComponentRef&) const = default;
};

enum class AttackVector { kV1, kV2, kV3, kV4, kV5 };

inline constexpr AttackVector kAllVectors[] = {
    AttackVector::kV1, AttackVector::kV2, AttackVector::kV3,
    AttackVector::kV4, AttackVector::kV5};

std::string_view to_string(AttackVector v);
AttackVector parse_attack_vector(std::string_view text);

enum class Severity { kCritical, kHigh, kMedium, kLow, kUnknown };

inline constexpr Severity kAllSeverities[] = {
    Severity::kCritical, Severity::kHigh, Severity::kMedium, Severity::kLow,
    Severity::kUnknown};

std::string_view to_string(Severity s);
// Case-insensitive; throws Error(kParse) on unknown names.
Severity parse_severity(std::string_view text);

// Rank for the total order Critical > High > Medium > Low. Unknown has no
// rank and compares as unordered with everything.
std::optional<int> severity_rank(Severity s);
bool severity_at_least(Severity s, Severity threshold);

struct Finding {
  std::string rule_id;
  AttackVector vector = AttackVector::kV1;
  Severity severity = Severity::kUnknown;
  ComponentRef component;
  std::string location;
  std::string evidence;
  std::string remediation;

  bool operator==(const Finding&) const = default;
};

// Canonical report ordering: (component, rule_id, location).
bool finding_less(const Finding& a, const Finding& b);

struct CountStats {
  double mean = 0;
  double median = 0;
  double min = 0;
  double max = 0;
  double stddev = 0;

  bool operator==(const CountStats&) const = default;
};

struct CdfPoint {
  std::int64_t count_threshold = 0;
  double fraction = 0;

  bool operator==(const CdfPoint&) const = default;
};

struct ScanReport {
  std::string corpus_id;
  std::map<ComponentRef, std::vector<Finding>> per_component;
  std::map<ComponentRef, std::uint64_t> vuln_counts;
  // Only non-zero buckets are stored; Unknown has its own bucket.
  std::map<Severity, std::uint64_t> severity_histogram;
  std::optional<CountStats> stats;
  std::vector<CdfPoint> cdf_points;

  bool operator==(const ScanReport&) const = default;
};

// CVSS 3.1 score to severity band. Absent and 0.0 map to Unknown.
Severity severity_band(std::optional<double> cvss_score);

CountStats summarize_counts(std::span<const std::uint64_t> counts);

std::vector<CdfPoint> cdf_of_counts(std::span<const std::uint64_t> counts,
                                    std::span<const std::int64_t> thresholds);

// 0, then 1-2-5 steps per decade until the largest count is covered.
std::vector<std::int64_t> default_cdf_thresholds(
    std::span<const std::uint64_t> counts);

}  // namespace slsa
