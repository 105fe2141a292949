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

#include "oracles.hpp"
#include "slsa_audit/error.hpp"
#include "slsa_audit/model.hpp"
#include "slsa_audit/util.hpp"
#include "test_support.hpp"

using namespace slsa;

TEST(SeverityBand, BoundaryValues) {
  EXPECT_EQ(severity_band(0.1), Severity::kLow);
  EXPECT_EQ(severity_band(3.9), Severity::kLow);
  EXPECT_EQ(severity_band(4.0), Severity::kMedium);
  EXPECT_EQ(severity_band(6.9), Severity::kMedium);
  EXPECT_EQ(severity_band(7.0), Severity::kHigh);
  EXPECT_EQ(severity_band(8.9), Severity::kHigh);
  EXPECT_EQ(severity_band(9.0), Severity::kCritical);
  EXPECT_EQ(severity_band(10.0), Severity::kCritical);
}

TEST(SeverityBand, ZeroAndAbsentAreUnknown) {
  EXPECT_EQ(severity_band(0.0), Severity::kUnknown);
  EXPECT_EQ(severity_band(std::nullopt), Severity::kUnknown);
}

TEST(SeverityBand, OutOfRangeThrows) {
  for (double bad : {-0.1, 10.1, std::nan("")}) {
    try {
      severity_band(bad);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kRange);
    }
  }
}

TEST(SeverityBand, SweepMatchesTenthsTable) {
  for (int t = 0; t <= 100; ++t) {
    EXPECT_EQ(severity_band(t / 10.0), oracle::band_of_tenths(t)) << t;
  }
}

TEST(SeverityBand, MonotoneInScore) {
  Severity prev = Severity::kLow;
  for (int t = 1; t <= 100; ++t) {
    const Severity s = severity_band(t / 10.0);
    EXPECT_GE(*severity_rank(s), *severity_rank(prev)) << t;
    prev = s;
  }
}

TEST(Severity, ParseRoundTrip) {
  for (auto s : kAllSeverities) EXPECT_EQ(parse_severity(to_string(s)), s);
  EXPECT_EQ(parse_severity("critical"), Severity::kCritical);
  EXPECT_THROW(parse_severity("severe"), Error);
}

TEST(Severity, UnknownIsUnranked) {
  EXPECT_FALSE(severity_rank(Severity::kUnknown).has_value());
  EXPECT_FALSE(severity_at_least(Severity::kUnknown, Severity::kLow));
  EXPECT_TRUE(severity_at_least(Severity::kCritical, Severity::kHigh));
  EXPECT_FALSE(severity_at_least(Severity::kMedium, Severity::kHigh));
}

TEST(ComponentRef, Display) {
  ComponentRef r{Repository::kDockerHub, "acme", "resizer", "1.0"};
  EXPECT_EQ(r.display(), "acme/resizer:1.0@DockerHub");
  r.version.reset();
  EXPECT_EQ(r.display(), "acme/resizer@DockerHub");
}

TEST(Repository, ParseIsCaseInsensitive) {
  for (auto r : {Repository::kDockerHub, Repository::kGitHub, Repository::kAwsSar,
                 Repository::kServerlessFramework, Repository::kRedHatQuay,
                 Repository::kLocalCorpus}) {
    EXPECT_EQ(parse_repository(to_lower(std::string(to_string(r)))), r);
  }
  EXPECT_THROW(parse_repository("npmjs"), Error);
}

TEST(AttackVector, ParseRoundTrip) {
  for (auto v : kAllVectors) EXPECT_EQ(parse_attack_vector(to_string(v)), v);
}

TEST(SummarizeCounts, HandComputed) {
  const std::vector<std::uint64_t> xs{2, 4, 4, 4, 5, 5, 7, 9};
  const auto s = summarize_counts(xs);
  EXPECT_DOUBLE_EQ(s.mean, 5.0);
  EXPECT_DOUBLE_EQ(s.median, 4.5);
  EXPECT_DOUBLE_EQ(s.min, 2.0);
  EXPECT_DOUBLE_EQ(s.max, 9.0);
  EXPECT_DOUBLE_EQ(s.stddev, 2.0);
}

TEST(SummarizeCounts, OddLengthMedianAndSingleton) {
  const std::vector<std::uint64_t> odd{9, 1, 5};
  EXPECT_DOUBLE_EQ(summarize_counts(odd).median, 5.0);
  const std::vector<std::uint64_t> one{3};
  const auto s = summarize_counts(one);
  EXPECT_DOUBLE_EQ(s.stddev, 0.0);
  EXPECT_DOUBLE_EQ(s.mean, 3.0);
}

TEST(SummarizeCounts, EmptyThrows) {
  try {
    summarize_counts({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kEmptyInput);
  }
}

TEST(SummarizeCounts, RandomAgainstOracle) {
  std::mt19937_64 rng(11);
  for (int round = 0; round < 300; ++round) {
    std::vector<std::uint64_t> xs(testsupport::uniform(rng, 1, 40));
    for (auto& x : xs) x = testsupport::uniform(rng, 0, 500);
    const auto got = summarize_counts(xs);
    const auto want = oracle::stats(xs);
    EXPECT_NEAR(got.mean, want.mean, 1e-9);
    EXPECT_DOUBLE_EQ(got.median, want.median);
    EXPECT_DOUBLE_EQ(got.min, want.min);
    EXPECT_DOUBLE_EQ(got.max, want.max);
    EXPECT_NEAR(got.stddev, want.stddev, 1e-9);
  }
}

TEST(CdfOfCounts, HandComputed) {
  const std::vector<std::uint64_t> xs{0, 0, 1, 3, 10};
  const std::vector<std::int64_t> ts{-1, 0, 1, 2, 5, 10};
  const auto cdf = cdf_of_counts(xs, ts);
  ASSERT_EQ(cdf.size(), 6u);
  EXPECT_DOUBLE_EQ(cdf[0].fraction, 0.0);
  EXPECT_DOUBLE_EQ(cdf[1].fraction, 0.4);
  EXPECT_DOUBLE_EQ(cdf[2].fraction, 0.6);
  EXPECT_DOUBLE_EQ(cdf[3].fraction, 0.6);
  EXPECT_DOUBLE_EQ(cdf[4].fraction, 0.8);
  EXPECT_DOUBLE_EQ(cdf[5].fraction, 1.0);
}

TEST(CdfOfCounts, MonotoneAndEndsAtOne) {
  std::mt19937_64 rng(5);
  for (int round = 0; round < 100; ++round) {
    std::vector<std::uint64_t> xs(testsupport::uniform(rng, 1, 30));
    for (auto& x : xs) x = testsupport::uniform(rng, 0, 2000);
    const auto ts = default_cdf_thresholds(xs);
    const auto cdf = cdf_of_counts(xs, ts);
    for (std::size_t i = 1; i < cdf.size(); ++i) {
      EXPECT_LE(cdf[i - 1].fraction, cdf[i].fraction);
    }
    EXPECT_DOUBLE_EQ(cdf.back().fraction, 1.0);
    for (const auto& p : cdf) EXPECT_DOUBLE_EQ(p.fraction, oracle::cdf_at(xs, p.count_threshold));
  }
}

TEST(CdfOfCounts, UnsortedThresholdsRejected) {
  const std::vector<std::uint64_t> xs{1};
  const std::vector<std::int64_t> ts{5, 1};
  EXPECT_THROW(cdf_of_counts(xs, ts), Error);
}

TEST(DefaultThresholds, OneTwoFiveSteps) {
  const std::vector<std::uint64_t> xs{0, 37};
  EXPECT_EQ(default_cdf_thresholds(xs), (std::vector<std::int64_t>{0, 1, 2, 5, 10, 20, 50}));
}

TEST(FindingOrder, ComponentThenRuleThenLocation) {
  Finding a{"B", AttackVector::kV1, Severity::kLow, {Repository::kGitHub, "a", "x", {}}, "2", "", ""};
  Finding b = a;
  b.rule_id = "A";
  Finding c = a;
  c.location = "1";
  EXPECT_TRUE(finding_less(b, a));
  EXPECT_TRUE(finding_less(c, a));
  Finding d = a;
  d.component.publisher = "0";
  EXPECT_TRUE(finding_less(d, b));
}
