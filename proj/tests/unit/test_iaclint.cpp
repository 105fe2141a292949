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

#include <map>
#include <random>

#include "permute.hpp"
#include "slsa_audit/error.hpp"
#include "slsa_audit/iaclint.hpp"
#include "slsa_audit/util.hpp"

using namespace slsa;
using namespace slsa::iac;

namespace {

const fs::path kIac = fs::path(SLSA_FIXTURE_DIR) / "iac";

std::vector<std::pair<fs::path, Framework>> classify_fixtures() {
  std::vector<std::pair<fs::path, Framework>> out;
  const std::pair<const char*, Framework> dirs[] = {{"terraform", Framework::kTerraform},
                                                    {"cloudformation", Framework::kCloudFormation},
                                                    {"sam", Framework::kSam}};
  for (const auto& [dir, fw] : dirs) {
    for (const auto& p : list_files_sorted(kIac / "classify" / dir)) out.emplace_back(p, fw);
  }
  return out;
}

// Rule, severity and resource; line spans move when keys are reordered.
std::multiset<std::string> finding_keys(const std::vector<Finding>& fs) {
  std::multiset<std::string> out;
  for (const auto& f : fs) {
    const auto slash = f.location.find('/');
    out.insert(f.rule_id + " " + std::string(to_string(f.severity)) + " " +
               (slash == std::string::npos ? "" : f.location.substr(slash)));
  }
  return out;
}

std::map<std::string, int> rules_fired(const char* fixture) {
  const fs::path p = kIac / "rules" / fixture;
  const auto r = lint_template(p, read_text_file(p), default_catalog());
  EXPECT_FALSE(r.error.has_value()) << fixture;
  std::map<std::string, int> out;
  for (const auto& f : r.findings) {
    if (f.rule_id == "R-ARN" || f.rule_id == "R-KMS" || f.rule_id == "R-CORS") ++out[f.rule_id];
  }
  return out;
}

Severity cors_severity(const char* fixture) {
  const fs::path p = kIac / "rules" / fixture;
  for (const auto& f : lint_template(p, read_text_file(p), default_catalog()).findings) {
    if (f.rule_id == "R-CORS") return f.severity;
  }
  return Severity::kUnknown;
}

Node props(std::string_view yaml) {
  const std::string doc = "Resources:\n  R:\n    Type: T\n    Properties:\n" + std::string(yaml);
  return parse_template(doc, Framework::kCloudFormation).resources.at(0).properties;
}

Truth eval(std::string_view expr, std::string_view yaml) {
  return Predicate::compile(expr).evaluate(props(yaml));
}

}  // namespace

TEST(Classify, ThirtyFixturesAllCorrect) {
  const auto fixtures = classify_fixtures();
  ASSERT_EQ(fixtures.size(), 30u);
  for (const auto& [path, want] : fixtures) {
    EXPECT_EQ(classify_template(path, read_text_file(path)), want) << path;
  }
}

TEST(Classify, TwinsDifferOnlyByTransform) {
  const auto cfn = read_text_file(kIac / "classify/cloudformation/10_twin.yaml");
  const auto sam = read_text_file(kIac / "classify/sam/10_twin.yaml");
  EXPECT_EQ(classify_template("t.yaml", cfn), Framework::kCloudFormation);
  EXPECT_EQ(classify_template("t.yaml", sam), Framework::kSam);
}

TEST(Classify, KeyOrderDoesNotMatter) {
  std::mt19937_64 rng(8);
  const auto catalog = default_catalog();
  for (const auto& [path, want] : classify_fixtures()) {
    const std::string text = read_text_file(path);
    const auto base = lint_template(path, text, catalog);
    ASSERT_FALSE(base.error.has_value()) << path << ": " << *base.error;
    EXPECT_GE(permute::distinct_orderings(path.filename().string(), text), 2u) << path;
    for (int round = 0; round < 5; ++round) {
      const std::string shuffled = permute::shuffle_template(path.filename().string(), text, rng);
      EXPECT_EQ(classify_template(path, shuffled), want) << path << "\n" << shuffled;
      const auto r = lint_template(path, shuffled, catalog);
      ASSERT_FALSE(r.error.has_value()) << path << "\n" << shuffled;
      EXPECT_EQ(finding_keys(r.findings), finding_keys(base.findings)) << path << "\n" << shuffled;
    }
  }
}

TEST(Classify, OtherExtensionsAreRejected) {
  try {
    classify_template("main.bicep", "resource x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUnsupportedExtension);
  }
}

TEST(Classify, BrokenYamlFallsBackToTextSearch) {
  std::vector<std::string> notices;
  EXPECT_EQ(classify_template("x.yaml", "Transform: AWS::Serverless-2016-10-31\nResources: [\n",
                              &notices),
            Framework::kSam);
  EXPECT_EQ(notices.size(), 1u);
}

TEST(RuleFixtures, EachPositiveFiresOnce) {
  EXPECT_EQ(rules_fired("arn_positive.yaml"), (std::map<std::string, int>{{"R-ARN", 1}}));
  EXPECT_EQ(rules_fired("arn_positive.tf"), (std::map<std::string, int>{{"R-ARN", 1}}));
  EXPECT_EQ(rules_fired("kms_positive.yaml"), (std::map<std::string, int>{{"R-KMS", 1}}));
  EXPECT_EQ(rules_fired("cors_positive.yaml"), (std::map<std::string, int>{{"R-CORS", 1}}));
}

TEST(RuleFixtures, NegatedFixturesFireNothing) {
  for (const char* f : {"arn_negated.yaml", "arn_negated.tf", "kms_negated.yaml", "cors_negated.yaml"}) {
    EXPECT_TRUE(rules_fired(f).empty()) << f;
  }
}

TEST(RuleFixtures, CorsSeverityFollowsAuthentication) {
  EXPECT_EQ(cors_severity("cors_positive.yaml"), Severity::kHigh);
  EXPECT_EQ(cors_severity("cors_authorizer.yaml"), Severity::kLow);
}

TEST(RuleFixtures, FindingsCarrySourceSpans) {
  const fs::path p = kIac / "rules/arn_positive.yaml";
  const auto r = lint_template(p, read_text_file(p), default_catalog(), {}, "rules/arn_positive.yaml");
  ASSERT_FALSE(r.findings.empty());
  EXPECT_EQ(r.findings[0].location, "rules/arn_positive.yaml:12-17/InvokeFromS3");
  EXPECT_EQ(r.findings[0].vector, AttackVector::kV4);
}

TEST(Parse, CloudFormationModel) {
  const auto m = parse_template(
      "Transform: AWS::Serverless-2016-10-31\n"
      "Parameters:\n  Origin:\n    Type: String\n    Default: '*'\n"
      "Globals:\n  Function:\n    Runtime: python3.12\n"
      "Resources:\n  Fn:\n    Type: AWS::Serverless::Function\n    Properties:\n"
      "      Handler: app.h\n      Role: !GetAtt Role.Arn\n",
      Framework::kSam, "t.yaml");
  EXPECT_EQ(m.transforms, std::vector<std::string>{std::string(kSamTransform)});
  EXPECT_EQ(m.parameters.at("Origin").default_value, "*");
  ASSERT_EQ(m.resources.size(), 1u);
  EXPECT_EQ(m.resources[0].span.first_line, 10);
  EXPECT_EQ(m.resources[0].span.last_line, 14);
  const Node* role = m.resources[0].properties.get("Role");
  ASSERT_NE(role, nullptr);
  EXPECT_TRUE(role->is_ref());
  EXPECT_EQ(role->scalar, "Fn::GetAtt");
  EXPECT_FALSE(m.globals.is_null());
}

TEST(Parse, TerraformBlocksAndExpressions) {
  const auto m = parse_template(
      "variable \"origin\" {\n  default = \"*\"\n}\n\n"
      "/* block comment */\n"
      "resource \"aws_s3_bucket\" \"logs\" {\n  bucket = \"logs-${var.env}\"\n"
      "  tags = {\n    team = \"x\" # trailing\n  }\n"
      "  policy = <<EOF\n{\"a\": 1}\nEOF\n"
      "  rule {\n    id = 1\n  }\n  rule {\n    id = 2\n  }\n}\n",
      Framework::kTerraform, "main.tf");
  EXPECT_EQ(m.parameters.at("origin").default_value, "*");
  ASSERT_EQ(m.resources.size(), 1u);
  const auto& r = m.resources[0];
  EXPECT_EQ(r.logical_id, "aws_s3_bucket.logs");
  EXPECT_EQ(r.span.first_line, 6);
  ASSERT_NE(r.properties.get("rule"), nullptr);
  EXPECT_EQ(r.properties.get("rule")->items.size(), 2u);
  EXPECT_EQ(r.properties.get("policy")->scalar, "{\"a\": 1}\n");
}

TEST(Parse, SyntaxErrorsCarryLines) {
  try {
    parse_template("resource \"a\" \"b\" {\n  x = \n}\n", Framework::kTerraform);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_GE(e.line(), 2);
  }
  try {
    parse_template("Resources:\n  A: [\n", Framework::kCloudFormation);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_GE(e.line(), 2);
  }
}

TEST(Predicate, Atoms) {
  EXPECT_EQ(eval("present(A)", "      A: 1\n"), Truth::kTrue);
  EXPECT_EQ(eval("missing(B)", "      A: 1\n"), Truth::kTrue);
  EXPECT_EQ(eval("A == 'x'", "      A: X\n"), Truth::kTrue);
  EXPECT_EQ(eval("A != 'x'", "      A: y\n"), Truth::kTrue);
  EXPECT_EQ(eval("matches(A, '^arn:aws:s3')", "      A: arn:aws:s3:::b\n"), Truth::kTrue);
}

TEST(Predicate, ListsAndWildcards) {
  const char* doc = "      L:\n        - K: a\n        - K: b\n      M:\n        x: {V: 1}\n        y: {V: 2}\n";
  EXPECT_EQ(eval("L.K == 'b'", doc), Truth::kTrue);
  EXPECT_EQ(eval("L.K == 'c'", doc), Truth::kFalse);
  EXPECT_EQ(eval("M.*.V == '2'", doc), Truth::kTrue);
}

TEST(Predicate, BooleanStructure) {
  const char* doc = "      A: 1\n      B: 2\n";
  EXPECT_EQ(eval("present(A) and not (B == '3' or missing(A))", doc), Truth::kTrue);
  EXPECT_EQ(eval("not present(A)", doc), Truth::kFalse);
}

TEST(Predicate, UnresolvedReferenceIsUndetermined) {
  const char* doc = "      A: !Ref Something\n";
  EXPECT_EQ(eval("A == 'x'", doc), Truth::kUndetermined);
  EXPECT_EQ(eval("A == 'x' or present(A)", doc), Truth::kTrue);
  EXPECT_EQ(eval("A == 'x' and missing(A)", doc), Truth::kFalse);
}

TEST(Predicate, ParameterDefaultsResolve) {
  const auto m = parse_template(
      "Parameters:\n  P:\n    Type: String\n    Default: AES256\n"
      "Resources:\n  R:\n    Type: T\n    Properties:\n      A: !Ref P\n",
      Framework::kCloudFormation);
  EXPECT_EQ(Predicate::compile("A == 'aes256'").evaluate(m.resources[0].properties, &m),
            Truth::kTrue);
}

TEST(Predicate, CompileErrorsHaveColumns) {
  for (const char* bad : {"present(A", "A ==", "A == 'x' and", "(A == 'x'", "A ~ 'x'"}) {
    try {
      Predicate::compile(bad);
      ADD_FAILURE() << bad;
    } catch (const ParseError& e) {
      EXPECT_GE(e.column(), 1) << bad;
    }
  }
}

TEST(Catalog, DefaultRoundTripsAndValidates) {
  const auto c = parse_catalog_json(default_catalog_json());
  for (const char* id : {"R-ARN", "R-KMS", "R-CORS"}) EXPECT_NE(c.find(id), nullptr) << id;
  EXPECT_EQ(c.rules.size(), default_catalog().rules.size());
  for (const char* bad :
       {"[]", R"({"rules": [{"rule_id": "A", "frameworks": ["CloudFormation"], "severity": "Low",
                 "matchers": [{"resource_types": ["X"], "when": "present("}]}]})",
        R"({"rules": [{"rule_id": "A", "frameworks": ["CloudFormation"], "severity": "Low", "matchers": []},
                      {"rule_id": "A", "frameworks": ["CloudFormation"], "severity": "Low", "matchers": []}]})"}) {
    try {
      parse_catalog_json(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kConfig);
    }
  }
}

TEST(Sweep, HistogramAndShares) {
  const auto results = lint_directory(kIac / "rules", default_catalog());
  EXPECT_EQ(results.size(), 9u);
  const auto h = severity_histogram(results);
  EXPECT_EQ(h.total.size(), 5u);
  EXPECT_EQ(h.per_framework.size(), 3u);
  std::uint64_t sum = 0;
  for (const auto& [s, n] : h.total) sum += n;
  std::uint64_t findings = 0;
  for (const auto& r : results) findings += r.findings.size();
  EXPECT_EQ(sum, findings);
  const auto shares = rule_shares(results);
  double total_share = 0;
  for (std::size_t i = 0; i < shares.size(); ++i) {
    total_share += shares[i].share_of_findings;
    if (i > 0) EXPECT_GE(shares[i - 1].findings, shares[i].findings);
  }
  EXPECT_NEAR(total_share, 1.0, 1e-12);
}
