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

#include "slsa_audit/typosquat.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <tuple>

#include "slsa_audit/error.hpp"
#include "slsa_audit/util.hpp"

namespace slsa::typo {

std::string_view to_string(NameKind k) {
  return k == NameKind::kUsername ? "username" : "image";
}

NameKind parse_name_kind(std::string_view text) {
  if (iequals(text, "username") || iequals(text, "user")) return NameKind::kUsername;
  if (iequals(text, "image") || iequals(text, "image-name") || iequals(text, "imagename")) {
    return NameKind::kImageName;
  }
  throw Error(ErrorKind::kParse, "unknown name kind '" + std::string(text) +
                                     "' (expected username or image)");
}

std::size_t dl_distance(std::string_view a, std::string_view b) {
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  // Three rolling rows: i-2, i-1, i.
  std::vector<std::size_t> prev2(m + 1), prev(m + 1), cur(m + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost});
      if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1]) {
        cur[j] = std::min(cur[j], prev2[j - 2] + 1);
      }
    }
    std::swap(prev2, prev);
    std::swap(prev, cur);
  }
  return prev[m];
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

void BkTree::insert(std::string word, std::size_t id) {
  if (nodes_.empty()) {
    nodes_.push_back({std::move(word), {id}, {}});
    return;
  }
  std::size_t at = 0;
  while (true) {
    const std::size_t d = levenshtein(word, nodes_[at].word);
    if (d == 0) {
      nodes_[at].ids.push_back(id);
      return;
    }
    auto& kids = nodes_[at].children;
    const auto it = std::find_if(kids.begin(), kids.end(),
                                 [d](const auto& c) { return c.first == d; });
    if (it == kids.end()) {
      kids.emplace_back(d, nodes_.size());
      nodes_.push_back({std::move(word), {id}, {}});
      return;
    }
    at = it->second;
  }
}

std::vector<std::string_view> BkTree::query(std::string_view word, std::size_t radius) const {
  std::vector<std::string_view> out;
  if (nodes_.empty()) return out;
  std::vector<std::size_t> stack{0};
  while (!stack.empty()) {
    const Node& node = nodes_[stack.back()];
    stack.pop_back();
    const std::size_t d = levenshtein(word, node.word);
    if (d <= radius) out.push_back(node.word);
    const std::size_t lo = d > radius ? d - radius : 0;
    const std::size_t hi = d + radius;
    for (const auto& [cd, child] : node.children) {
      if (cd >= lo && cd <= hi) stack.push_back(child);
    }
  }
  return out;
}

const std::vector<std::size_t>& BkTree::ids(std::string_view word) const {
  static const std::vector<std::size_t> none;
  if (nodes_.empty()) return none;
  std::size_t at = 0;
  while (true) {
    const std::size_t d = levenshtein(word, nodes_[at].word);
    if (d == 0) return nodes_[at].ids;
    const auto& kids = nodes_[at].children;
    const auto it = std::find_if(kids.begin(), kids.end(),
                                 [d](const auto& c) { return c.first == d; });
    if (it == kids.end()) return none;
    at = it->second;
  }
}

std::string normalize_name(std::string_view raw, const NormalizeOptions& options) {
  std::string_view s = trim(raw);
  if (options.strip_namespace) {
    if (const auto at = s.find('@'); at != std::string_view::npos) s = s.substr(0, at);
    if (const auto slash = s.rfind('/'); slash != std::string_view::npos) s = s.substr(slash + 1);
    if (const auto colon = s.find(':'); colon != std::string_view::npos) s = s.substr(0, colon);
  }
  return options.lowercase ? to_lower(s) : std::string(s);
}

std::vector<NameRecord> records_from_components(std::span<const ComponentRef> components,
                                                const RecordOptions& options) {
  std::map<std::string, ComponentRef> users;
  std::set<std::tuple<Repository, std::string, std::string>> seen_images;
  std::vector<NameRecord> out;
  std::vector<ComponentRef> sorted(components.begin(), components.end());
  std::sort(sorted.begin(), sorted.end());
  for (const auto& c : sorted) {
    if (c.repository == Repository::kAwsSar && !options.include_aws_sar) continue;
    const std::string user = normalize_name(c.publisher, options.normalize);
    if (!user.empty()) users.emplace(user, c);
    const std::string image = normalize_name(c.name, options.normalize);
    if (!image.empty() && seen_images.emplace(c.repository, c.publisher, image).second) {
      out.push_back({image, NameKind::kImageName, c});
    }
  }
  for (const auto& [name, owner] : users) out.push_back({name, NameKind::kUsername, owner});
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

NearPair make_pair(const NameRecord& x, const NameRecord& y, std::size_t d) {
  return x < y ? NearPair{x, y, d} : NearPair{y, x, d};
}

bool pair_less(const NearPair& p, const NearPair& q) {
  return std::tie(p.distance, p.a, p.b) < std::tie(q.distance, q.a, q.b);
}

}  // namespace

NearPairResult find_near_pairs(std::span<const NameRecord> records, std::size_t max_distance) {
  if (max_distance == 0) throw Error(ErrorKind::kRange, "max distance must be at least 1");
  NearPairResult result;
  for (const NameKind kind : {NameKind::kUsername, NameKind::kImageName}) {
    BkTree tree;
    std::vector<std::string> words;
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (records[i].kind != kind) continue;
      if (tree.ids(records[i].name).empty()) words.push_back(records[i].name);
      tree.insert(records[i].name, i);
    }
    for (const auto& w : words) {
      const auto& own = tree.ids(w);
      for (std::size_t x = 0; x < own.size(); ++x) {
        for (std::size_t y = x + 1; y < own.size(); ++y) {
          const auto& rx = records[own[x]];
          const auto& ry = records[own[y]];
          if (rx.owner != ry.owner) result.collisions.push_back(make_pair(rx, ry, 0));
        }
      }
      for (const auto candidate : tree.query(w, 2 * max_distance)) {
        if (!(w < candidate)) continue;
        const std::size_t gap = w.size() > candidate.size() ? w.size() - candidate.size()
                                                            : candidate.size() - w.size();
        if (gap > max_distance) continue;
        const std::size_t d = dl_distance(w, candidate);
        if (d == 0 || d > max_distance) continue;
        for (const auto i : own) {
          for (const auto j : tree.ids(candidate)) {
            result.pairs.push_back(make_pair(records[i], records[j], d));
          }
        }
      }
    }
  }
  std::sort(result.pairs.begin(), result.pairs.end(), pair_less);
  std::sort(result.collisions.begin(), result.collisions.end(), pair_less);
  return result;
}

std::vector<double> distance_cdf(std::span<const NameRecord> records, std::size_t max_distance) {
  if (records.size() < 2) {
    throw Error(ErrorKind::kEmptyInput, "distance CDF needs at least 2 names");
  }
  std::vector<std::uint64_t> at(max_distance + 1, 0);
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (std::size_t j = i + 1; j < records.size(); ++j) {
      if (records[i].kind != records[j].kind) continue;
      ++total;
      const std::string& a = records[i].name;
      const std::string& b = records[j].name;
      const std::size_t gap = a.size() > b.size() ? a.size() - b.size() : b.size() - a.size();
      if (gap > max_distance) continue;
      const std::size_t d = dl_distance(a, b);
      if (d <= max_distance) ++at[d];
    }
  }
  std::vector<double> cdf(max_distance + 1, 0.0);
  std::uint64_t running = 0;
  for (std::size_t d = 0; d <= max_distance; ++d) {
    running += at[d];
    cdf[d] = total == 0 ? 0.0 : static_cast<double>(running) / static_cast<double>(total);
  }
  return cdf;
}

}  // namespace slsa::typo
