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

#include "slsa_audit/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "slsa_audit/error.hpp"
#include "slsa_audit/util.hpp"

namespace slsa {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kRange: return "range";
    case ErrorKind::kEmptyInput: return "empty-input";
    case ErrorKind::kNotFound: return "not-found";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kAuth: return "auth";
    case ErrorKind::kRateLimit: return "rate-limit";
    case ErrorKind::kNetwork: return "network";
    case ErrorKind::kUnsupportedFormat: return "unsupported-format";
    case ErrorKind::kUnsupportedExtension: return "unsupported-extension";
    case ErrorKind::kExtraction: return "extraction";
    case ErrorKind::kSecurity: return "security";
    case ErrorKind::kBomb: return "bomb";
    case ErrorKind::kIncompleteCommand: return "incomplete-command";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kVersion: return "version";
    case ErrorKind::kConsistency: return "consistency";
    case ErrorKind::kConfig: return "config";
  }
  return "unknown";
}

namespace {

constexpr std::pair<Repository, std::string_view> kRepositoryNames[] = {
    {Repository::kDockerHub, "DockerHub"},
    {Repository::kGitHub, "GitHub"},
    {Repository::kAwsSar, "AwsSar"},
    {Repository::kServerlessFramework, "ServerlessFramework"},
    {Repository::kRedHatQuay, "RedHatQuay"},
    {Repository::kLocalCorpus, "LocalCorpus"},
};

constexpr std::pair<Severity, std::string_view> kSeverityNames[] = {
    {Severity::kCritical, "Critical"}, {Severity::kHigh, "High"},
    {Severity::kMedium, "Medium"},     {Severity::kLow, "Low"},
    {Severity::kUnknown, "Unknown"},
};

}  // namespace

std::string_view to_string(Repository repo) {
  for (const auto& [r, name] : kRepositoryNames) {
    if (r == repo) return name;
  }
  return "LocalCorpus";
}

Repository parse_repository(std::string_view text) {
  for (const auto& [r, name] : kRepositoryNames) {
    if (iequals(text, name)) return r;
  }
  throw Error(ErrorKind::kParse,
              "unknown repository '" + std::string(text) + "'");
}

std::string ComponentRef::display() const {
  std::string out = publisher + "/" + name;
  if (version) out += ":" + *version;
  out += "@";
  out += to_string(repository);
  return out;
}

std::string_view to_string(AttackVector v) {
  switch (v) {
    case AttackVector::kV1: return "V1";
    case AttackVector::kV2: return "V2";
    case AttackVector::kV3: return "V3";
    case AttackVector::kV4: return "V4";
    case AttackVector::kV5: return "V5";
  }
  return "V1";
}

AttackVector parse_attack_vector(std::string_view text) {
  for (AttackVector v : kAllVectors) {
    if (iequals(text, to_string(v))) return v;
  }
  throw Error(ErrorKind::kParse,
              "unknown attack vector '" + std::string(text) + "'");
}

std::string_view to_string(Severity s) {
  for (const auto& [sev, name] : kSeverityNames) {
    if (sev == s) return name;
  }
  return "Unknown";
}

Severity parse_severity(std::string_view text) {
  for (const auto& [sev, name] : kSeverityNames) {
    if (iequals(text, name)) return sev;
  }
  throw Error(ErrorKind::kParse, "unknown severity '" + std::string(text) + "'");
}

std::optional<int> severity_rank(Severity s) {
  switch (s) {
    case Severity::kCritical: return 4;
    case Severity::kHigh: return 3;
    case Severity::kMedium: return 2;
    case Severity::kLow: return 1;
    case Severity::kUnknown: return std::nullopt;
  }
  return std::nullopt;
}

bool severity_at_least(Severity s, Severity threshold) {
  auto a = severity_rank(s);
  auto b = severity_rank(threshold);
  return a && b && *a >= *b;
}

bool finding_less(const Finding& a, const Finding& b) {
  return std::tie(a.component, a.rule_id, a.location, a.evidence) <
         std::tie(b.component, b.rule_id, b.location, b.evidence);
}

Severity severity_band(std::optional<double> cvss_score) {
  if (!cvss_score) return Severity::kUnknown;
  const double score = *cvss_score;
  if (!std::isfinite(score) || score < 0.0 || score > 10.0) {
    throw Error(ErrorKind::kRange,
                "CVSS score " + std::to_string(score) + " outside [0.0, 10.0]");
  }
  // Scores carry one decimal digit; compare in tenths so 3.95-style float
  // noise from arithmetic cannot fall between bands.
  const long tenths = std::lround(score * 10.0);
  if (tenths == 0) return Severity::kUnknown;
  if (tenths <= 39) return Severity::kLow;
  if (tenths <= 69) return Severity::kMedium;
  if (tenths <= 89) return Severity::kHigh;
  return Severity::kCritical;
}

CountStats summarize_counts(std::span<const std::uint64_t> counts) {
  if (counts.empty()) {
    throw Error(ErrorKind::kEmptyInput, "summarize_counts: empty count list");
  }
  std::vector<std::uint64_t> sorted(counts.begin(), counts.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());

  CountStats stats;
  stats.min = static_cast<double>(sorted.front());
  stats.max = static_cast<double>(sorted.back());
  const double sum = std::accumulate(
      sorted.begin(), sorted.end(), 0.0,
      [](double acc, std::uint64_t c) { return acc + static_cast<double>(c); });
  stats.mean = sum / n;

  const std::size_t mid = sorted.size() / 2;
  if (sorted.size() % 2 == 1) {
    stats.median = static_cast<double>(sorted[mid]);
  } else {
    stats.median = (static_cast<double>(sorted[mid - 1]) +
                    static_cast<double>(sorted[mid])) /
                   2.0;
  }

  // Population standard deviation.
  double sq = 0;
  for (std::uint64_t c : sorted) {
    const double d = static_cast<double>(c) - stats.mean;
    sq += d * d;
  }
  stats.stddev = std::sqrt(sq / n);
  if (stats.min == stats.max) stats.stddev = 0;
  return stats;
}

std::vector<CdfPoint> cdf_of_counts(std::span<const std::uint64_t> counts,
                                    std::span<const std::int64_t> thresholds) {
  if (counts.empty()) {
    throw Error(ErrorKind::kEmptyInput, "cdf_of_counts: empty count list");
  }
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
    throw Error(ErrorKind::kRange, "cdf_of_counts: thresholds must be sorted");
  }
  std::vector<std::uint64_t> sorted(counts.begin(), counts.end());
  std::sort(sorted.begin(), sorted.end());
  const auto n = static_cast<double>(sorted.size());

  std::vector<CdfPoint> points;
  points.reserve(thresholds.size());
  for (std::int64_t t : thresholds) {
    std::size_t at_or_below = 0;
    if (t >= 0) {
      at_or_below = static_cast<std::size_t>(
          std::upper_bound(sorted.begin(), sorted.end(),
                           static_cast<std::uint64_t>(t)) -
          sorted.begin());
    }
    points.push_back({t, static_cast<double>(at_or_below) / n});
  }
  return points;
}

std::vector<std::int64_t> default_cdf_thresholds(
    std::span<const std::uint64_t> counts) {
  std::uint64_t top = 0;
  for (auto c : counts) top = std::max(top, c);
  std::vector<std::int64_t> out{0};
  std::int64_t decade = 1;
  while (true) {
    for (std::int64_t step : {1, 2, 5}) {
      const std::int64_t t = step * decade;
      out.push_back(t);
      if (static_cast<std::uint64_t>(t) >= top) return out;
    }
    decade *= 10;
  }
}

}  // namespace slsa
