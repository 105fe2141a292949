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

// Random instance builders shared by the unit and acceptance tests. Each
// builder fills the library structures and the matching oracle structures
// from the same draws.
#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "slsa_audit/model.hpp"
#include "slsa_audit/report.hpp"
#include "slsa_audit/typosquat.hpp"
#include "slsa_audit/vulnscan.hpp"
#include "test_support.hpp"

namespace gen {

using testsupport::coin;
using testsupport::uniform;

struct MatchInstance {
  slsa::vulnscan::PackageInventory inventory;
  std::vector<slsa::vulnscan::Advisory> advisories;
  std::vector<oracle::Pkg> pkgs;
  std::vector<oracle::Adv> oracle_db;
};

inline std::string eco_name(slsa::vulnscan::Ecosystem e) {
  return std::string(slsa::vulnscan::to_string(e));
}

inline std::string small_version(std::mt19937_64& rng) {
  return std::to_string(uniform(rng, 0, 3)) + "." + std::to_string(uniform(rng, 0, 3)) + "." +
         std::to_string(uniform(rng, 0, 3));
}

// Up to 20 package declarations and 50 advisories over a small name pool so
// collisions are common.
inline MatchInstance match_instance(std::mt19937_64& rng) {
  using slsa::vulnscan::Ecosystem;
  static const char* kNames[] = {"alpha", "beta", "gamma", "delta", "eps", "zeta"};
  static const Ecosystem kEcos[] = {Ecosystem::kNpm, Ecosystem::kPypi, Ecosystem::kGomod};
  static const char* kFiles[] = {"package.json", "svc/package.json", "requirements.txt", "go.mod"};

  MatchInstance inst;
  std::map<std::pair<std::string, std::string>, oracle::Pkg> pkgs;
  const int declarations = uniform(rng, 0, 20);
  for (int i = 0; i < declarations; ++i) {
    const std::string name = kNames[uniform(rng, 0, 5)];
    const Ecosystem eco = kEcos[uniform(rng, 0, 2)];
    const std::string version = small_version(rng);
    const std::string file = kFiles[uniform(rng, 0, 3)];
    inst.inventory.add(name, eco, version, file);
    auto& p = pkgs[{eco_name(eco), name}];
    p.ecosystem = eco_name(eco);
    p.name = name;
    p.versions.insert(version);
    p.declared_in.insert(file);
  }
  for (auto& pkg : inst.inventory.packages()) {
    if (coin(rng)) {
      pkg.referenced_in_source.insert("src/main");
      pkgs[{eco_name(pkg.ecosystem), pkg.name}].referenced = true;
    }
  }
  for (auto& [k, p] : pkgs) inst.pkgs.push_back(p);

  const int count = uniform(rng, 0, 50);
  for (int i = 0; i < count; ++i) {
    slsa::vulnscan::Advisory a;
    oracle::Adv o;
    // Ids repeat now and then, as they do across OSV affected entries.
    a.id = o.id = "ADV-" + std::to_string(uniform(rng, 0, count));
    a.ecosystem = kEcos[uniform(rng, 0, 2)];
    o.ecosystem = eco_name(a.ecosystem);
    a.package_name = o.name = kNames[uniform(rng, 0, 5)];
    const int ranges = uniform(rng, 0, 2);
    for (int r = 0; r < ranges; ++r) {
      slsa::vulnscan::VersionInterval iv;
      oracle::Range orr;
      if (coin(rng, 0.8)) {
        const auto lo = small_version(rng);
        iv.low = slsa::vulnscan::Bound{lo, true};
        orr.introduced = lo;
      }
      if (coin(rng, 0.8)) {
        const auto hi = small_version(rng);
        iv.high = slsa::vulnscan::Bound{hi, false};
        orr.fixed = hi;
      }
      a.affected.push_back(iv);
      o.ranges.push_back(orr);
    }
    const int listed = uniform(rng, 0, 2);
    for (int l = 0; l < listed; ++l) {
      const auto v = small_version(rng);
      a.affected_versions.push_back(v);
      o.listed.push_back(v);
    }
    if (coin(rng, 0.9)) {
      o.score_tenths = uniform(rng, 0, 100);
      a.cvss_score = o.score_tenths / 10.0;
    }
    inst.advisories.push_back(a);
    inst.oracle_db.push_back(o);
  }
  return inst;
}

inline std::set<oracle::Match> as_oracle(const std::vector<slsa::vulnscan::VulnMatch>& ms) {
  std::set<oracle::Match> out;
  for (const auto& m : ms) {
    out.insert({m.advisory_id, m.package.name, m.package.version, eco_name(m.package.ecosystem),
                m.severity, m.fp_class == slsa::vulnscan::FpClass::kMetadataOnly, m.declared_in});
  }
  return out;
}

// Random names over a narrow alphabet so near pairs show up.
inline std::vector<slsa::typo::NameRecord> name_corpus(std::mt19937_64& rng, int size) {
  std::vector<slsa::typo::NameRecord> out;
  std::vector<std::string> seeds;
  for (int i = 0; i < 8; ++i) seeds.push_back(testsupport::random_string(rng, "abcde", 3, 9));
  for (int i = 0; i < size; ++i) {
    std::string s;
    if (coin(rng, 0.6)) {
      s = seeds[uniform(rng, 0, 7)];
      // A few random edits, including swaps.
      const int edits = uniform(rng, 0, 3);
      for (int e = 0; e < edits && !s.empty(); ++e) {
        const std::size_t at = uniform(rng, 0, static_cast<int>(s.size()) - 1);
        switch (uniform(rng, 0, 3)) {
          case 0: s[at] = "abcde"[uniform(rng, 0, 4)]; break;
          case 1: s.erase(at, 1); break;
          case 2: s.insert(at, 1, "abcde"[uniform(rng, 0, 4)]); break;
          default:
            if (at + 1 < s.size()) std::swap(s[at], s[at + 1]);
        }
      }
    } else {
      s = testsupport::random_string(rng, "abcdefg", 1, 10);
    }
    slsa::typo::NameRecord r;
    r.name = s;
    r.kind = coin(rng) ? slsa::typo::NameKind::kUsername : slsa::typo::NameKind::kImageName;
    r.owner.repository = slsa::Repository::kDockerHub;
    r.owner.publisher = "p" + std::to_string(uniform(rng, 0, 40));
    r.owner.name = "c" + std::to_string(i);
    out.push_back(r);
  }
  return out;
}

// Every same-kind pair, checked with the recursive OSA oracle.
inline slsa::typo::NearPairResult brute_near_pairs(
    const std::vector<slsa::typo::NameRecord>& records, std::size_t max_distance) {
  slsa::typo::NearPairResult out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (std::size_t j = i + 1; j < records.size(); ++j) {
      const auto& x = records[i];
      const auto& y = records[j];
      if (x.kind != y.kind) continue;
      const std::size_t d = oracle::osa(x.name, y.name);
      slsa::typo::NearPair p = x < y ? slsa::typo::NearPair{x, y, d} : slsa::typo::NearPair{y, x, d};
      if (d == 0) {
        if (x.owner != y.owner) out.collisions.push_back(p);
      } else if (d <= max_distance) {
        out.pairs.push_back(p);
      }
    }
  }
  auto less = [](const slsa::typo::NearPair& p, const slsa::typo::NearPair& q) {
    return std::tie(p.distance, p.a, p.b) < std::tie(q.distance, q.a, q.b);
  };
  std::sort(out.pairs.begin(), out.pairs.end(), less);
  std::sort(out.collisions.begin(), out.collisions.end(), less);
  return out;
}

// Findings over a handful of components, including duplicates that
// aggregate must drop.
inline std::vector<slsa::report::FindingBatch> report_batches(std::mt19937_64& rng,
                                                              const std::string& corpus,
                                                              std::map<slsa::ComponentRef, std::uint64_t>* counts) {
  using namespace slsa;
  static const Repository kRepos[] = {Repository::kDockerHub, Repository::kGitHub,
                                      Repository::kAwsSar, Repository::kRedHatQuay};
  std::vector<ComponentRef> comps;
  const int n = uniform(rng, 1, 8);
  for (int i = 0; i < n; ++i) {
    ComponentRef c{kRepos[uniform(rng, 0, 3)], "pub" + std::to_string(uniform(rng, 0, 3)),
                   "c" + std::to_string(i), {}};
    if (coin(rng)) c.version = std::to_string(uniform(rng, 1, 3)) + ".0";
    comps.push_back(c);
    if (counts && coin(rng, 0.8)) (*counts)[c] = uniform(rng, 0, 300);
  }
  std::vector<report::FindingBatch> batches(uniform(rng, 1, 4));
  for (auto& b : batches) {
    b.corpus_id = corpus;
    const int k = uniform(rng, 0, 15);
    for (int i = 0; i < k; ++i) {
      Finding f;
      f.rule_id = "R-" + std::to_string(uniform(rng, 0, 4));
      f.vector = kAllVectors[uniform(rng, 0, 4)];
      f.severity = kAllSeverities[uniform(rng, 0, 4)];
      f.component = comps[uniform(rng, 0, n - 1)];
      f.location = "file" + std::to_string(uniform(rng, 0, 5)) + ":" + std::to_string(uniform(rng, 1, 99));
      f.evidence = testsupport::random_string(rng, "ab \"\n\\", 0, 12);
      f.remediation = "fix it";
      b.findings.push_back(f);
    }
  }
  return batches;
}

}  // namespace gen
