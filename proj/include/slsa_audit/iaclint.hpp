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

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "slsa_audit/model.hpp"

namespace slsa::iac {

namespace fs = std::filesystem;

enum class Framework { kTerraform, kCloudFormation, kSam };

inline constexpr Framework kAllFrameworks[] = {Framework::kTerraform, Framework::kCloudFormation,
                                               Framework::kSam};

std::string_view to_string(Framework f);
// Case-insensitive. Throws Error(kParse).
Framework parse_framework(std::string_view text);

inline constexpr std::string_view kSamTransform = "AWS::Serverless-2016-10-31";

// Property tree shared by the YAML/JSON and HCL front ends.
struct Node {
  enum class Kind { kNull, kScalar, kList, kMap, kRef };

  Kind kind = Kind::kNull;
  // Scalar text; for kRef the function name ("Ref", "Fn::GetAtt", "Fn::Sub",
  // or "expr" for an HCL expression).
  std::string scalar;
  std::vector<Node> items;                            // list elements / ref args
  std::vector<std::pair<std::string, Node>> fields;  // map entries in order
  int line = 0;                                       // 1-based

  static Node null_at(int line);
  static Node scalar_at(std::string text, int line);
  static Node map_at(int line);
  static Node list_at(int line);

  bool is_null() const { return kind == Kind::kNull; }
  bool is_scalar() const { return kind == Kind::kScalar; }
  bool is_map() const { return kind == Kind::kMap; }
  bool is_list() const { return kind == Kind::kList; }
  bool is_ref() const { return kind == Kind::kRef; }

  const Node* get(std::string_view key) const;
  // Largest line number in this subtree.
  int last_line() const;
  // Compact single-line rendering, used in evidence and reference lookups.
  std::string text() const;

  bool operator==(const Node&) const = default;
};

struct SourceSpan {
  std::string file;
  int first_line = 0;
  int last_line = 0;

  bool operator==(const SourceSpan&) const = default;
};

struct ResourceNode {
  std::string logical_id;  // Terraform: "<type>.<name>"
  std::string resource_type;
  Node properties;
  SourceSpan span;
};

struct Parameter {
  std::string type;
  std::optional<std::string> default_value;  // scalar defaults only
  int line = 0;
};

struct TemplateModel {
  Framework framework = Framework::kCloudFormation;
  std::string file;
  int line_count = 0;
  std::map<std::string, Parameter> parameters;
  std::vector<ResourceNode> resources;
  std::vector<std::string> transforms;
  Node globals;  // SAM `Globals` section, null when absent
  std::vector<std::string> notices;

  const ResourceNode* find(std::string_view logical_id) const;
};

// .tf -> Terraform; .json/.yaml/.yml -> SAM when a top-level Transform value
// is the SAM directive, CloudFormation otherwise. Unparseable documents fall
// back to a textual Transform search and add a notice.
// Throws Error(kUnsupportedExtension) for any other extension.
Framework classify_template(const fs::path& path, std::string_view contents,
                            std::vector<std::string>* notices = nullptr);

// Throws ParseError (with line) on syntax errors.
TemplateModel parse_template(std::string_view contents, Framework framework,
                             std::string file = "");

// ---------------------------------------------------------------------------
// Matcher mini-language
//
//   expr    := or
//   or      := and ("or" and)*
//   and     := unary ("and" unary)*
//   unary   := "not" unary | "(" expr ")" | atom
//   atom    := "present(" path ")" | "missing(" path ")"
//            | "matches(" path "," string ")"
//            | path ("==" | "!=") string
//   path    := segment ("." segment)*      segment: key or "*"
//
// Lists are crossed implicitly: `a.b == 'x'` holds when any reached value
// equals x (case-insensitive). References that cannot be resolved make the
// result undetermined rather than true or false.

enum class Truth { kFalse, kTrue, kUndetermined };

class Predicate {
 public:
  // Throws ParseError with the 1-based column of the offending token.
  static Predicate compile(std::string_view text);

  // `model` resolves `Ref`/`var.` parameters to their scalar defaults.
  Truth evaluate(const Node& properties, const TemplateModel* model = nullptr) const;
  const std::string& text() const { return text_; }

  struct Expr;

 private:
  std::shared_ptr<const Expr> expr_;
  std::string text_;
};

struct Matcher {
  std::set<Framework> frameworks;
  std::vector<std::string> resource_types;
  Predicate when;
};

struct CorsOptions {
  // Lowercased key fragments (underscores ignored) that mark an allowed
  // origin setting or a CORS origin parameter.
  std::vector<std::string> origin_key_markers{"corsorigin", "alloworigin", "allowedorigin"};
  // Lowercased keys (underscores ignored) that configure authentication.
  // A value of NONE or an empty value does not count.
  std::vector<std::string> auth_keys{"auth",         "authorizer",        "authorizers",
                                     "authtype",     "authorizationtype", "defaultauthorizer",
                                     "authorization", "authorizerid"};
  // Lowercased resource type fragments treated as authorizer resources.
  std::vector<std::string> authorizer_types{"apigateway::authorizer", "apigatewayv2::authorizer",
                                            "aws_api_gateway_authorizer",
                                            "aws_apigatewayv2_authorizer"};
  // Lowercased resource type fragments treated as API front doors.
  std::vector<std::string> api_types{"apigateway", "serverless::api", "serverless::httpapi",
                                     "serverless::function", "lambda::url",
                                     "aws_lambda_function_url"};
};

struct MisconfigRule {
  std::string rule_id;
  std::set<Framework> frameworks;
  Severity severity = Severity::kUnknown;
  std::string description;
  std::string remediation;
  std::vector<Matcher> matchers;
  // Built-in procedure instead of matchers; only "cors-wildcard" exists.
  std::string check;
};

struct Catalog {
  std::vector<MisconfigRule> rules;
  CorsOptions cors;

  const MisconfigRule* find(std::string_view rule_id) const;
};

std::string default_catalog_json();
Catalog default_catalog();
// Throws Error(kConfig) on schema problems, duplicate rule ids or a bad
// matcher expression.
Catalog parse_catalog_json(std::string_view text);
Catalog load_catalog(const fs::path& path);

struct RuleRun {
  std::vector<Finding> findings;  // canonical order
  std::vector<std::string> notices;
};

RuleRun run_rules(const TemplateModel& model, const Catalog& catalog,
                  const ComponentRef& component = {});

// Wildcard CORS origin feeding an unauthenticated API gives `severity`;
// a wildcard on an authenticated API, on a non-API resource or on an unused
// parameter gives Low.
std::vector<Finding> check_cors_wildcard(const TemplateModel& model,
                                         const CorsOptions& options = {},
                                         const ComponentRef& component = {},
                                         std::string_view rule_id = "R-CORS",
                                         Severity severity = Severity::kHigh);

// ---------------------------------------------------------------------------
// Corpus sweep

struct TemplateResult {
  std::string file;
  Framework framework = Framework::kCloudFormation;
  std::vector<Finding> findings;
  std::vector<std::string> notices;
  std::optional<std::string> error;  // parse failure; no findings then
};

bool is_template_extension(const fs::path& path);

// classify + parse + run_rules. Throws like classify_template.
TemplateResult lint_template(const fs::path& path, std::string_view contents,
                             const Catalog& catalog, const ComponentRef& component = {},
                             std::string label = "");

// Every template under dir, sorted by path. Labels are `label_prefix` plus
// the relative path.
std::vector<TemplateResult> lint_directory(const fs::path& dir, const Catalog& catalog,
                                           const ComponentRef& component = {},
                                           std::string_view label_prefix = "iac/");

struct SeverityHistogram {
  std::map<Severity, std::uint64_t> total;
  std::map<Framework, std::map<Severity, std::uint64_t>> per_framework;

  bool operator==(const SeverityHistogram&) const = default;
};

// Every framework and severity is present, zero when unused.
SeverityHistogram severity_histogram(std::span<const TemplateResult> results);

struct RuleShare {
  std::string rule_id;
  std::uint64_t findings = 0;
  std::uint64_t templates = 0;    // templates with at least one hit
  double share_of_findings = 0;   // findings / all findings
  double share_of_templates = 0;  // templates / parsed templates
};

// Sorted by findings descending, then rule id.
std::vector<RuleShare> rule_shares(std::span<const TemplateResult> results);

}  // namespace slsa::iac
