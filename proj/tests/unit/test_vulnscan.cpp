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

#include <gtest/gtest.h>

#include <random>

#include "generators.hpp"
#include "oracles.hpp"
#include "slsa_audit/error.hpp"
#include "slsa_audit/util.hpp"
#include "slsa_audit/vulnscan.hpp"
#include "test_support.hpp"

using namespace slsa;
using namespace slsa::vulnscan;
using testsupport::TempDir;

namespace {

const Package* find_pkg(const PackageInventory& inv, const std::string& name) {
  for (const auto& p : inv.packages()) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

void write(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  write_binary_file(p, to_bytes(text));
}

VulnMatch match_with(FpClass c, int i) {
  VulnMatch m;
  m.advisory_id = "A-" + std::to_string(i);
  m.package = {"p" + std::to_string(i), "1.0.0", Ecosystem::kNpm};
  m.fp_class = c;
  return m;
}

}  // namespace

TEST(Manifests, PackageJsonRangesResolveToMinimum) {
  const auto r = parse_manifest(
      "package.json",
      R"({"dependencies": {"lodash": "^4.17.15", "left-pad": "1.3.0", "any": "*"},
          "devDependencies": {"jest": "~29.1.0"}})");
  EXPECT_EQ(find_pkg(r.inventory, "lodash")->versions, std::set<std::string>{"4.17.15"});
  EXPECT_EQ(find_pkg(r.inventory, "left-pad")->versions, std::set<std::string>{"1.3.0"});
  EXPECT_EQ(find_pkg(r.inventory, "jest")->versions, std::set<std::string>{"29.1.0"});
  EXPECT_TRUE(find_pkg(r.inventory, "any")->versions.empty());
  EXPECT_FALSE(r.notices.empty());
}

TEST(Manifests, Requirements) {
  const auto r = parse_manifest("requirements.txt",
                                "# pinned\nrequests==2.19.0\nFlask>=2.0 # web\n"
                                "boto3\n-r other.txt\nPyYAML[extra] == 5.3 ; python_version<'3.12'\n");
  EXPECT_EQ(find_pkg(r.inventory, "requests")->versions, std::set<std::string>{"2.19.0"});
  EXPECT_EQ(find_pkg(r.inventory, "flask")->versions, std::set<std::string>{"2.0"});
  EXPECT_TRUE(find_pkg(r.inventory, "boto3")->versions.empty());
  EXPECT_EQ(find_pkg(r.inventory, "pyyaml")->versions, std::set<std::string>{"5.3"});
}

TEST(Manifests, SyntaxErrorNamesLine) {
  try {
    parse_manifest("requirements.txt", "ok==1.0\nbad==\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
}

TEST(Manifests, GoModAndOsPackages) {
  const auto g = parse_manifest("go.mod",
                                "module x\n\ngo 1.21\n\nrequire (\n\tgolang.org/x/text v0.3.5\n"
                                "\tgithub.com/a/b v1.2.3 // indirect\n)\n");
  EXPECT_EQ(find_pkg(g.inventory, "golang.org/x/text")->versions, std::set<std::string>{"0.3.5"});
  EXPECT_NE(find_pkg(g.inventory, "github.com/a/b"), nullptr);
  const auto o = parse_manifest("os-packages.txt", "openssl=1.1.1k\nzlib=1.2.13\n");
  EXPECT_EQ(o.inventory.packages().size(), 2u);
}

TEST(Manifests, UnsupportedKindIsSkippedWithNotice) {
  const auto r = parse_manifest("Gemfile", "gem 'rails'\n");
  EXPECT_TRUE(r.inventory.empty());
  EXPECT_EQ(r.notices.size(), 1u);
}

TEST(Inventory, DuplicatesMergeAcrossManifests) {
  PackageInventory inv;
  inv.add("lodash", Ecosystem::kNpm, "4.17.15", "a/package.json");
  inv.add("lodash", Ecosystem::kNpm, "4.17.21", "b/package.json");
  inv.add("lodash", Ecosystem::kPypi, "1.0", "requirements.txt");
  ASSERT_EQ(inv.packages().size(), 2u);
  const auto* p = find_pkg(inv, "lodash");
  EXPECT_EQ(p->versions.size(), 2u);
  EXPECT_EQ(p->declared_in.size(), 2u);
}

TEST(SourceReferences, ImportContexts) {
  Package p;
  p.name = "lodash";
  p.ecosystem = Ecosystem::kNpm;
  EXPECT_TRUE(references_package("const _ = require('lodash');", p));
  EXPECT_TRUE(references_package("import merge from \"lodash/merge\";", p));
  EXPECT_FALSE(references_package("// lodash is nice", p));
  Package py;
  py.name = "requests";
  py.ecosystem = Ecosystem::kPypi;
  EXPECT_TRUE(references_package("import os\nimport requests\n", py));
  EXPECT_TRUE(references_package("from requests.adapters import HTTPAdapter\n", py));
  EXPECT_FALSE(references_package("requests = []\n", py));
}

TEST(SourceReferences, MetadataFilesDoNotCount) {
  TempDir tmp;
  write(tmp / "package.json", R"({"dependencies": {"lodash": "4.17.15", "chalk": "4.0.0"}})");
  write(tmp / "README.md", "require('chalk')\n");
  write(tmp / "src/index.js", "const _ = require('lodash');\n");
  auto inv = collect_inventory(tmp.path());
  mark_source_references(inv.inventory, tmp.path());
  EXPECT_FALSE(find_pkg(inv.inventory, "lodash")->referenced_in_source.empty());
  EXPECT_TRUE(find_pkg(inv.inventory, "chalk")->referenced_in_source.empty());
}

TEST(Osv, ParsesRangesAndScore) {
  const auto advs = parse_osv(R"({
    "id": "GHSA-1", "summary": "s",
    "severity": [{"type": "CVSS_V3", "score": "CVSS:3.1/AV:N"}, {"type": "X", "score": 7.5}],
    "affected": [{"package": {"ecosystem": "npm", "name": "lodash"},
                  "ranges": [{"type": "SEMVER", "events": [{"introduced": "0"}, {"fixed": "4.17.19"}]}],
                  "versions": ["3.0.0"]}]})");
  ASSERT_EQ(advs.size(), 1u);
  EXPECT_EQ(advs[0].cvss_score, 7.5);
  EXPECT_TRUE(advs[0].affects(*Version::parse("4.17.15")));
  EXPECT_FALSE(advs[0].affects(*Version::parse("4.17.19")));
}

TEST(Osv, FieldErrorsAreFormatErrors) {
  try {
    parse_osv(R"({"id": "X", "affected": [{"package": {"name": "a"}}]})");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kFormat);
    EXPECT_NE(std::string(e.what()).find("ecosystem"), std::string::npos);
  }
}

TEST(Match, ExactFixture) {
  PackageInventory inv;
  inv.add("lodash", Ecosystem::kNpm, "4.17.15", "package.json");
  inv.add("lodash", Ecosystem::kNpm, "4.17.21", "sub/package.json");
  Advisory a;
  a.id = "GHSA-1";
  a.ecosystem = Ecosystem::kNpm;
  a.package_name = "lodash";
  a.affected.push_back({Bound{"0", true}, Bound{"4.17.19", false}});
  a.cvss_score = 7.4;
  const AdvisoryIndex db({a});
  const auto r = match_advisories(inv, db);
  ASSERT_EQ(r.matches.size(), 1u);
  EXPECT_EQ(r.matches[0].package.version, "4.17.15");
  EXPECT_EQ(r.matches[0].severity, Severity::kHigh);
  EXPECT_EQ(r.matches[0].fp_class, FpClass::kMetadataOnly);
}

TEST(Match, RandomInstancesEqualBruteForce) {
  std::mt19937_64 rng(2024);
  for (int round = 0; round < 300; ++round) {
    auto inst = gen::match_instance(rng);
    const AdvisoryIndex db(inst.advisories);
    const auto got = match_advisories(inst.inventory, db);
    EXPECT_EQ(gen::as_oracle(got.matches), oracle::brute_matches(inst.pkgs, inst.oracle_db))
        << "round " << round;
    EXPECT_EQ(got.matches.size(), gen::as_oracle(got.matches).size());
  }
}

TEST(FalsePositives, RateAndPartition) {
  std::vector<VulnMatch> ms;
  for (int i = 0; i < 1417; ++i) {
    ms.push_back(match_with(i < 142 ? FpClass::kMetadataOnly : FpClass::kSourceReferenced, i));
  }
  const auto part = filter_false_positives(ms);
  EXPECT_NEAR(part.fp_rate, 0.1002, 0.0001);
  EXPECT_EQ(part.suspected_fp.size(), 142u);
  EXPECT_EQ(part.kept.size(), 1275u);
}

TEST(FalsePositives, EmptyInputRateIsZero) {
  EXPECT_EQ(filter_false_positives({}).fp_rate, 0.0);
}

TEST(Jaccard, Basics) {
  EXPECT_DOUBLE_EQ(jaccard_similarity({}, {}), 1.0);
  EXPECT_DOUBLE_EQ(jaccard_similarity({"A", "B"}, {"B", "C"}), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(jaccard_similarity({"A"}, {}), 0.0);
}

TEST(Jaccard, RandomAgainstSetArithmetic) {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 300; ++i) {
    std::set<std::string> a, b;
    for (int k = testsupport::uniform(rng, 0, 10); k > 0; --k) a.insert(testsupport::random_string(rng, "abcd", 1, 2));
    for (int k = testsupport::uniform(rng, 0, 10); k > 0; --k) b.insert(testsupport::random_string(rng, "abcd", 1, 2));
    EXPECT_DOUBLE_EQ(jaccard_similarity(a, b), oracle::jaccard(a, b));
    EXPECT_DOUBLE_EQ(jaccard_similarity(a, b), jaccard_similarity(b, a));
  }
}

TEST(ExternalScan, MinimalSubsets) {
  const auto t = import_external_scan(
      R"([{"VulnerabilityID": "CVE-1", "ArtifactName": "img"}, {"VulnerabilityID": "CVE-2", "ArtifactName": "img"}])",
      ExternalFormat::kTrivyJson);
  EXPECT_EQ(t.at("img"), (std::set<std::string>{"CVE-1", "CVE-2"}));
  const auto g = import_external_scan(R"([{"id": "CVE-2", "component": "img"}])",
                                      ExternalFormat::kGrypeJson);
  EXPECT_EQ(g.at("img").size(), 1u);
  try {
    import_external_scan(R"([{"id": "CVE-2"}])", ExternalFormat::kGrypeJson);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kFormat);
    EXPECT_NE(std::string(e.what()).find("component"), std::string::npos);
  }
}

TEST(Findings, MetadataOnlyIsTagged) {
  std::vector<VulnMatch> ms{match_with(FpClass::kMetadataOnly, 1)};
  ms[0].declared_in = "package.json";
  const auto fs = to_findings(ms, {});
  ASSERT_EQ(fs.size(), 1u);
  EXPECT_EQ(fs[0].vector, AttackVector::kV1);
  EXPECT_EQ(fs[0].location, "package.json#p1@1.0.0");
  EXPECT_NE(fs[0].evidence.find("metadata-only"), std::string::npos);
}
