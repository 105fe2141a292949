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
#include "slsa_audit/typosquat.hpp"
#include "test_support.hpp"

using namespace slsa;
using namespace slsa::typo;

namespace {

ComponentRef comp(Repository repo, const std::string& pub, const std::string& name) {
  return {repo, pub, name, {}};
}

}  // namespace

TEST(Distance, KnownValues) {
  EXPECT_EQ(dl_distance("ca", "abc"), 3u);
  EXPECT_EQ(levenshtein("ca", "abc"), 3u);
  EXPECT_EQ(dl_distance("ab", "ba"), 1u);
  EXPECT_EQ(levenshtein("ab", "ba"), 2u);
  EXPECT_EQ(dl_distance("acme", "acne"), 1u);
  EXPECT_EQ(dl_distance("", "abc"), 3u);
  EXPECT_EQ(dl_distance("kitten", "sitting"), 3u);
  EXPECT_EQ(dl_distance("serverless", "serverelss"), 1u);
}

TEST(Distance, OsaIsNotAMetric) {
  // d(ca, ac) + d(ac, abc) = 2 < d(ca, abc) = 3.
  EXPECT_LT(dl_distance("ca", "ac") + dl_distance("ac", "abc"), dl_distance("ca", "abc"));
}

TEST(Distance, RandomPairsAgainstRecursiveDefinition) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 3000; ++i) {
    const auto a = testsupport::random_string(rng, "abcd", 0, 8);
    const auto b = testsupport::random_string(rng, "abcd", 0, 8);
    const auto d = dl_distance(a, b);
    EXPECT_EQ(d, oracle::osa(a, b)) << a << " " << b;
    EXPECT_EQ(d, dl_distance(b, a));
    const auto lev = levenshtein(a, b);
    EXPECT_LE(d, lev);
    EXPECT_LE(lev, 2 * d);
  }
}

TEST(Distance, LevenshteinTriangleInequality) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 2000; ++i) {
    const auto a = testsupport::random_string(rng, "abc", 0, 6);
    const auto b = testsupport::random_string(rng, "abc", 0, 6);
    const auto c = testsupport::random_string(rng, "abc", 0, 6);
    EXPECT_LE(levenshtein(a, c), levenshtein(a, b) + levenshtein(b, c));
  }
}

TEST(BkTree, QueryEqualsLinearScan) {
  std::mt19937_64 rng(12);
  std::vector<std::string> words;
  BkTree tree;
  for (std::size_t i = 0; i < 400; ++i) {
    words.push_back(testsupport::random_string(rng, "abcde", 1, 7));
    tree.insert(words.back(), i);
  }
  for (int q = 0; q < 100; ++q) {
    const auto probe = testsupport::random_string(rng, "abcde", 1, 7);
    for (std::size_t radius : {0u, 1u, 2u, 3u}) {
      std::set<std::string> want;
      for (const auto& w : words) {
        if (levenshtein(w, probe) <= radius) want.insert(w);
      }
      std::set<std::string> got;
      for (auto w : tree.query(probe, radius)) got.insert(std::string(w));
      EXPECT_EQ(got, want) << probe << " r=" << radius;
    }
  }
}

TEST(BkTree, DuplicatesShareANode) {
  BkTree t;
  t.insert("abc", 0);
  t.insert("abc", 5);
  t.insert("abd", 1);
  EXPECT_EQ(t.size(), 2u);
  EXPECT_EQ(t.ids("abc"), (std::vector<std::size_t>{0, 5}));
}

TEST(NearPairs, RandomCorporaEqualBruteForce) {
  std::mt19937_64 rng(4242);
  for (int round = 0; round < 20; ++round) {
    const auto records = gen::name_corpus(rng, testsupport::uniform(rng, 2, 200));
    for (std::size_t max : {1u, 2u}) {
      const auto got = find_near_pairs(records, max);
      const auto want = gen::brute_near_pairs(records, max);
      EXPECT_EQ(got.pairs, want.pairs) << "round " << round << " max " << max;
      EXPECT_EQ(got.collisions, want.collisions) << "round " << round;
    }
  }
}

TEST(NearPairs, ZeroMaxDistanceIsRejected) {
  try {
    find_near_pairs({}, 0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kRange);
  }
}

TEST(Records, NormalizationAndDedup) {
  EXPECT_EQ(normalize_name("quay.io/Acme/Image-Resizer:1.2@sha256:ab"), "image-resizer");
  EXPECT_EQ(normalize_name("Acme/Tool", {false, false}), "Acme/Tool");
  const std::vector<ComponentRef> comps{
      comp(Repository::kDockerHub, "acme", "image-resizer"),
      comp(Repository::kDockerHub, "acme", "thumbnailer"),
      comp(Repository::kDockerHub, "acne", "image-resiser"),
      comp(Repository::kAwsSar, "aws", "hello-world"),
  };
  const auto recs = records_from_components(comps);
  std::size_t users = 0, images = 0;
  for (const auto& r : recs) (r.kind == NameKind::kUsername ? users : images)++;
  EXPECT_EQ(users, 2u);
  EXPECT_EQ(images, 3u);
  RecordOptions with_sar;
  with_sar.include_aws_sar = true;
  EXPECT_EQ(records_from_components(comps, with_sar).size(), 7u);

  const auto near = find_near_pairs(recs, 1);
  ASSERT_EQ(near.pairs.size(), 2u);
  EXPECT_EQ(near.pairs[0].distance, 1u);
}

TEST(Records, CollisionNeedsDifferentOwners) {
  const std::vector<ComponentRef> comps{comp(Repository::kDockerHub, "alice", "api"),
                                        comp(Repository::kGitHub, "robert", "api")};
  const auto near = find_near_pairs(records_from_components(comps), 1);
  EXPECT_TRUE(near.pairs.empty());
  ASSERT_EQ(near.collisions.size(), 1u);
  EXPECT_EQ(near.collisions[0].distance, 0u);
}

TEST(DistanceCdf, FractionsOfSameKindPairs) {
  std::vector<NameRecord> recs(3);
  recs[0].name = "abc";
  recs[1].name = "abd";
  recs[2].name = "xyz";
  for (std::size_t i = 0; i < recs.size(); ++i) recs[i].owner.name = std::to_string(i);
  const auto cdf = distance_cdf(recs, 3);
  ASSERT_EQ(cdf.size(), 4u);
  EXPECT_DOUBLE_EQ(cdf[0], 0.0);
  EXPECT_DOUBLE_EQ(cdf[1], 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(cdf[3], 1.0);
  EXPECT_THROW(distance_cdf(std::span<const NameRecord>(recs.data(), 1), 2), Error);
}
