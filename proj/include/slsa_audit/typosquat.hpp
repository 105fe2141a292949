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

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slsa_audit/model.hpp"

namespace slsa::typo {

enum class NameKind { kUsername, kImageName };

std::string_view to_string(NameKind k);
// "username" or "image" (also "image-name"). Throws Error(kParse).
NameKind parse_name_kind(std::string_view text);

struct NameRecord {
  std::string name;
  NameKind kind = NameKind::kImageName;
  ComponentRef owner;

  auto operator<=>(const NameRecord&) const = default;
  bool operator==(const NameRecord&) const = default;
};

struct NearPair {
  NameRecord a;  // a < b
  NameRecord b;
  std::size_t distance = 0;

  bool operator==(const NearPair&) const = default;
};

// Optimal string alignment distance: insertions, deletions, substitutions
// and adjacent transpositions, no substring edited twice. Not a metric.
std::size_t dl_distance(std::string_view a, std::string_view b);

// Plain edit distance. A metric, and levenshtein <= 2 * dl_distance since a
// transposition costs two plain edits.
std::size_t levenshtein(std::string_view a, std::string_view b);

// Burkhard-Keller tree under levenshtein.
class BkTree {
 public:
  // Duplicate words share a node; the id list keeps insertion order.
  void insert(std::string word, std::size_t id);
  // Every stored word within `radius` (levenshtein) of `word`.
  std::vector<std::string_view> query(std::string_view word, std::size_t radius) const;
  const std::vector<std::size_t>& ids(std::string_view word) const;
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    std::string word;
    std::vector<std::size_t> ids;
    std::vector<std::pair<std::size_t, std::size_t>> children;  // (distance, node)
  };
  std::vector<Node> nodes_;
};

struct NormalizeOptions {
  bool lowercase = true;
  // Drop registry host, namespace, tag and digest: "quay.io/a/b:1" -> "b".
  bool strip_namespace = true;
};

std::string normalize_name(std::string_view raw, const NormalizeOptions& options = {});

struct RecordOptions {
  NormalizeOptions normalize;
  bool include_aws_sar = false;
};

// One username record per distinct publisher name and one image record per
// (repository, publisher, name). Names empty after normalization are dropped.
std::vector<NameRecord> records_from_components(std::span<const ComponentRef> components,
                                                const RecordOptions& options = {});

struct NearPairResult {
  // 1 <= distance <= max, sorted by (distance, a, b).
  std::vector<NearPair> pairs;
  // Identical names with different owners (distance 0), sorted by (a, b).
  std::vector<NearPair> collisions;
};

// Kinds are compared separately. Candidates come from a BK-tree query of
// radius 2 * max_distance, then are confirmed with dl_distance.
// Throws Error(kRange) when max_distance is 0.
NearPairResult find_near_pairs(std::span<const NameRecord> records, std::size_t max_distance);

// Fraction of same-kind pairs with distance <= d, for d = 0..max_distance.
// Throws Error(kEmptyInput) with fewer than 2 records.
std::vector<double> distance_cdf(std::span<const NameRecord> records, std::size_t max_distance);

}  // namespace slsa::typo
