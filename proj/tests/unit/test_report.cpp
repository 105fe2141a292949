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
#include "slsa_audit/error.hpp"
#include "slsa_audit/report.hpp"

using namespace slsa;
using namespace slsa::report;

namespace {

const ComponentRef kA{Repository::kDockerHub, "acme", "resizer", "1.0"};
const ComponentRef kB{Repository::kGitHub, "org", "fn", {}};

Finding finding(const std::string& rule, Severity s, const ComponentRef& c, const std::string& loc,
                AttackVector v = AttackVector::kV4) {
  return {rule, v, s, c, loc, "evidence", "fix"};
}

}  // namespace

TEST(Aggregate, DedupsAndSorts) {
  const std::vector<FindingBatch> batches{
      {"demo", {finding("R-2", Severity::kHigh, kA, "x:1"), finding("R-1", Severity::kLow, kA, "x:2")}},
      {"demo", {finding("R-2", Severity::kCritical, kA, "x:1"), finding("R-1", Severity::kLow, kB, "y")}}};
  const auto r = aggregate("demo", batches, {{kA, 3}, {kB, 0}});
  ASSERT_EQ(r.per_component.at(kA).size(), 2u);
  EXPECT_EQ(r.per_component.at(kA)[0].rule_id, "R-1");
  // First occurrence wins.
  EXPECT_EQ(r.per_component.at(kA)[1].severity, Severity::kHigh);
  EXPECT_EQ(total_findings(r), 3u);
  EXPECT_EQ(r.severity_histogram.at(Severity::kLow), 2u);
  EXPECT_EQ(r.severity_histogram.count(Severity::kCritical), 0u);
  ASSERT_TRUE(r.stats.has_value());
  EXPECT_DOUBLE_EQ(r.stats->mean, 1.5);
}

TEST(Aggregate, ComponentsWithoutFindingsStillAppear) {
  const ComponentRef c{Repository::kAwsSar, "aws", "clean", {}};
  const auto r = aggregate("demo", {}, {{c, 0}});
  ASSERT_EQ(r.per_component.count(c), 1u);
  EXPECT_TRUE(r.per_component.at(c).empty());
}

TEST(Aggregate, ForeignBatchIsAConsistencyError) {
  const std::vector<FindingBatch> batches{{"other", {}}};
  try {
    aggregate("demo", batches, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConsistency);
  }
}

TEST(Aggregate, HistogramMatchesFindings) {
  std::mt19937_64 rng(21);
  for (int round = 0; round < 200; ++round) {
    std::map<ComponentRef, std::uint64_t> counts;
    const auto batches = gen::report_batches(rng, "c", &counts);
    const auto r = aggregate("c", batches, counts);
    std::map<Severity, std::uint64_t> hist;
    std::set<std::tuple<std::string, ComponentRef, std::string>> keys;
    for (const auto& [ref, fs] : r.per_component) {
      EXPECT_TRUE(std::is_sorted(fs.begin(), fs.end(), finding_less));
      for (const auto& f : fs) {
        ++hist[f.severity];
        EXPECT_TRUE(keys.emplace(f.rule_id, f.component, f.location).second);
      }
    }
    EXPECT_EQ(hist, r.severity_histogram);
    std::set<std::tuple<std::string, ComponentRef, std::string>> input;
    for (const auto& b : batches) {
      for (const auto& f : b.findings) input.emplace(f.rule_id, f.component, f.location);
    }
    EXPECT_EQ(keys, input);
  }
}

TEST(Json, RoundTripIsIdentity) {
  std::mt19937_64 rng(22);
  for (int round = 0; round < 200; ++round) {
    std::map<ComponentRef, std::uint64_t> counts;
    const auto r = aggregate("c", gen::report_batches(rng, "c", &counts), counts);
    const std::string text = emit(r, OutputFormat::kJson);
    const auto back = parse_report(text);
    EXPECT_EQ(back, r);
    EXPECT_EQ(emit(back, OutputFormat::kJson), text);
  }
}

TEST(Json, RunWrapperParses) {
  AuditRun run;
  run.corpus_id = "demo";
  run.enabled_vectors = {AttackVector::kV4};
  run.report = aggregate("demo", std::vector<FindingBatch>{{"demo", {finding("R", Severity::kLow, kA, "f")}}}, {});
  EXPECT_EQ(parse_report(emit_run(run, OutputFormat::kJson)), run.report);
}

TEST(Json, BadFieldsAreNamed) {
  for (const auto& [doc, field] : std::vector<std::pair<std::string, std::string>>{
           {R"({"corpus_id": 5})", "corpus_id"},
           {R"({"corpus_id": "x", "per_component": [{"component": {"repository": "Nowhere", "publisher": "a", "name": "b"}, "findings": []}]})",
            "repository"},
           {R"({"corpus_id": "x", "per_component": [{"component": {"repository": "GitHub", "publisher": "a", "name": "b"}, "findings": [{"rule_id": "R"}]}]})",
            "vector"}}) {
    try {
      parse_report(doc);
      ADD_FAILURE() << doc;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kFormat) << doc;
      EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
    }
  }
}

TEST(Sarif, LevelsAndLocations) {
  EXPECT_EQ(sarif_level(Severity::kCritical), "error");
  EXPECT_EQ(sarif_level(Severity::kHigh), "error");
  EXPECT_EQ(sarif_level(Severity::kMedium), "warning");
  EXPECT_EQ(sarif_level(Severity::kLow), "note");
  EXPECT_EQ(sarif_level(Severity::kUnknown), "none");
  const auto r = aggregate(
      "demo", std::vector<FindingBatch>{{"demo", {finding("R-ARN", Severity::kHigh, kA, "iac/t.yaml:12-17/Perm")}}}, {});
  const auto doc = nlohmann::json::parse(emit(r, OutputFormat::kSarifLike));
  const auto& res = doc["runs"][0]["results"][0];
  EXPECT_EQ(res["level"], "error");
  EXPECT_EQ(res["locations"][0]["physicalLocation"]["artifactLocation"]["uri"], "iac/t.yaml");
  EXPECT_EQ(res["locations"][0]["physicalLocation"]["region"]["startLine"], 12);
}

TEST(Table, EmptyReportIsHeaderOnly) {
  const std::string t = emit(aggregate("demo", {}, {}), OutputFormat::kTable);
  EXPECT_NE(t.find("Repository"), std::string::npos);
  EXPECT_EQ(t.find("Severity"), std::string::npos);
  EXPECT_EQ(t.find("DockerHub"), std::string::npos);
}

TEST(Table, RowsPerRepository) {
  const auto r = aggregate(
      "demo", std::vector<FindingBatch>{{"demo", {finding("R", Severity::kMedium, kB, "f")}}},
      {{kA, 4}, {kB, 2}});
  const std::string t = emit(r, OutputFormat::kTable);
  EXPECT_NE(t.find("DockerHub"), std::string::npos);
  EXPECT_NE(t.find("GitHub"), std::string::npos);
  EXPECT_NE(t.find("Medium=1"), std::string::npos);
}

TEST(Validate, ConsistencyRules) {
  AuditRun run;
  run.corpus_id = "demo";
  run.report = aggregate("demo", std::vector<FindingBatch>{{"demo", {finding("R", Severity::kLow, kA, "f", AttackVector::kV3)}}}, {});
  EXPECT_THROW(validate(run), Error);  // no vectors
  run.enabled_vectors = {AttackVector::kV4};
  EXPECT_THROW(validate(run), Error);  // V3 finding while disabled
  run.enabled_vectors.insert(AttackVector::kV3);
  EXPECT_NO_THROW(validate(run));
  run.corpus_id = "other";
  EXPECT_THROW(validate(run), Error);
}

TEST(ExitCode, FailOnThreshold) {
  const auto r = aggregate("demo", std::vector<FindingBatch>{{"demo", {finding("R", Severity::kMedium, kA, "f")}}}, {});
  EXPECT_EQ(exit_code_for(r, std::nullopt), 0);
  EXPECT_EQ(exit_code_for(r, Severity::kHigh), 0);
  EXPECT_EQ(exit_code_for(r, Severity::kMedium), 1);
  EXPECT_EQ(exit_code_for(r, Severity::kLow), 1);
}

TEST(OutputFormat, Names) {
  EXPECT_EQ(parse_output_format("sarif"), OutputFormat::kSarifLike);
  EXPECT_EQ(parse_output_format("sarif-like"), OutputFormat::kSarifLike);
  EXPECT_THROW(parse_output_format("xml"), Error);
}
