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

#include "slsa_audit/version.hpp"
#include "test_support.hpp"

using slsa::Version;

namespace {

int cmp(const char* a, const char* b) {
  return compare(*Version::parse(a), *Version::parse(b));
}

}  // namespace

TEST(Version, SemverPrecedence) {
  EXPECT_LT(cmp("1.2.3", "1.10.0"), 0);
  EXPECT_LT(cmp("1.0.0-alpha", "1.0.0"), 0);
  EXPECT_LT(cmp("1.0.0-alpha", "1.0.0-alpha.1"), 0);
  EXPECT_LT(cmp("1.0.0-alpha.1", "1.0.0-alpha.beta"), 0);
  EXPECT_LT(cmp("1.0.0-beta.2", "1.0.0-beta.11"), 0);
  EXPECT_LT(cmp("1.0.0-rc.1", "1.0.0"), 0);
  EXPECT_EQ(cmp("1.0.0+build.1", "1.0.0+build.2"), 0);
  EXPECT_EQ(cmp("v2.0.0", "2.0.0"), 0);
}

TEST(Version, SegmentFallback) {
  EXPECT_FALSE(Version::parse("1.1.1k")->is_semver());
  EXPECT_LT(cmp("1.1.1k", "1.1.1l"), 0);
  EXPECT_LT(cmp("5.3", "5.4"), 0);
  EXPECT_EQ(cmp("5.4", "5.4.0"), 0);
  EXPECT_LT(cmp("2.9", "2.10"), 0);
}

TEST(Version, RejectsNonVersions) {
  EXPECT_FALSE(Version::parse(""));
  EXPECT_FALSE(Version::parse("latest"));
  EXPECT_FALSE(Version::parse("^1.2.3"));
  EXPECT_FALSE(Version::parse("1.2 3"));
}

TEST(Version, TotalOrderOnRandomTriples) {
  std::mt19937_64 rng(3);
  auto gen = [&] {
    return std::to_string(testsupport::uniform(rng, 0, 12)) + "." +
           std::to_string(testsupport::uniform(rng, 0, 12)) + "." +
           std::to_string(testsupport::uniform(rng, 0, 12));
  };
  for (int i = 0; i < 2000; ++i) {
    const auto a = *Version::parse(gen());
    const auto b = *Version::parse(gen());
    const auto c = *Version::parse(gen());
    EXPECT_EQ(compare(a, b), -compare(b, a));
    if (compare(a, b) <= 0 && compare(b, c) <= 0) EXPECT_LE(compare(a, c), 0);
  }
}
