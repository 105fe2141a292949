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

#include <algorithm>
#include <nlohmann/json.hpp>

#include "iac/detail.hpp"
#include "slsa_audit/error.hpp"
#include "slsa_audit/util.hpp"

namespace slsa::iac {

using nlohmann::json;

std::string default_catalog_json() {
  return R"json({
  "rules": [
    {
      "rule_id": "R-ARN",
      "severity": "High",
      "description": "Lambda permission without a source ARN; any resource of the principal service can invoke the function",
      "remediation": "Set SourceArn (source_arn) to the specific bucket, topic, rule or API allowed to invoke the function.",
      "matchers": [
        {"frameworks": ["CloudFormation", "SAM"], "resource_types": ["AWS::Lambda::Permission"],
         "when": "missing(SourceArn)"},
        {"frameworks": ["Terraform"], "resource_types": ["aws_lambda_permission"],
         "when": "missing(source_arn)"}
      ]
    },
    {
      "rule_id": "R-KMS",
      "severity": "Medium",
      "description": "S3 bucket encrypted with an AWS-managed key instead of a customer-managed KMS key",
      "remediation": "Use SSE-KMS with a customer-managed key (KMSMasterKeyID / kms_master_key_id).",
      "matchers": [
        {"frameworks": ["CloudFormation", "SAM"], "resource_types": ["AWS::S3::Bucket"],
         "when": "missing(BucketEncryption.ServerSideEncryptionConfiguration.ServerSideEncryptionByDefault.KMSMasterKeyID) or matches(BucketEncryption.ServerSideEncryptionConfiguration.ServerSideEncryptionByDefault.KMSMasterKeyID, '^(arn:aws:kms:[^:]*:[^:]*:)?alias/aws/')"},
        {"frameworks": ["Terraform"], "resource_types": ["aws_s3_bucket"],
         "when": "present(server_side_encryption_configuration) and (missing(server_side_encryption_configuration.rule.apply_server_side_encryption_by_default.kms_master_key_id) or matches(server_side_encryption_configuration.rule.apply_server_side_encryption_by_default.kms_master_key_id, '^(arn:aws:kms:[^:]*:[^:]*:)?alias/aws/'))"},
        {"frameworks": ["Terraform"], "resource_types": ["aws_s3_bucket_server_side_encryption_configuration"],
         "when": "missing(rule.apply_server_side_encryption_by_default.kms_master_key_id) or matches(rule.apply_server_side_encryption_by_default.kms_master_key_id, '^(arn:aws:kms:[^:]*:[^:]*:)?alias/aws/')"}
      ]
    },
    {
      "rule_id": "R-CORS",
      "severity": "High",
      "description": "Wildcard CORS allowed origin on an API without authentication",
      "remediation": "Restrict the allowed origin to known domains and require an authorizer on the API.",
      "check": "cors-wildcard"
    },
    {
      "rule_id": "R-S3-PUBLIC-ACL",
      "severity": "High",
      "description": "S3 bucket with a public canned ACL",
      "remediation": "Use a private ACL and S3 Block Public Access.",
      "matchers": [
        {"frameworks": ["CloudFormation", "SAM"], "resource_types": ["AWS::S3::Bucket"],
         "when": "AccessControl == 'PublicRead' or AccessControl == 'PublicReadWrite'"},
        {"frameworks": ["Terraform"], "resource_types": ["aws_s3_bucket", "aws_s3_bucket_acl"],
         "when": "acl == 'public-read' or acl == 'public-read-write'"}
      ]
    },
    {
      "rule_id": "R-IAM-WILDCARD",
      "severity": "High",
      "description": "IAM policy statement allowing every action",
      "remediation": "List the specific actions the principal needs.",
      "matchers": [
        {"frameworks": ["CloudFormation", "SAM"], "resource_types": ["AWS::IAM::Policy", "AWS::IAM::ManagedPolicy"],
         "when": "PolicyDocument.Statement.Action == '*'"},
        {"frameworks": ["CloudFormation", "SAM"], "resource_types": ["AWS::IAM::Role", "AWS::IAM::User", "AWS::IAM::Group"],
         "when": "Policies.PolicyDocument.Statement.Action == '*'"},
        {"frameworks": ["SAM"], "resource_types": ["AWS::Serverless::Function"],
         "when": "Policies.Statement.Action == '*'"},
        {"frameworks": ["Terraform"], "resource_types": ["aws_iam_policy", "aws_iam_role_policy", "aws_iam_user_policy", "aws_iam_group_policy"],
         "when": "matches(policy, '\"Action\"\\s*:\\s*(\\[[^\\]]*)?\"\\*\"')"}
      ]
    },
    {
      "rule_id": "R-LAMBDA-ENV-UNENCRYPTED",
      "severity": "Medium",
      "description": "Lambda environment variables without a customer-managed KMS key",
      "remediation": "Set KmsKeyArn (kms_key_arn) on functions that define environment variables.",
      "matchers": [
        {"frameworks": ["CloudFormation", "SAM"], "resource_types": ["AWS::Lambda::Function"],
         "when": "present(Environment.Variables) and missing(KmsKeyArn)"},
        {"frameworks": ["SAM"], "resource_types": ["AWS::Serverless::Function"],
         "when": "present(Environment.Variables) and missing(KmsKeyArn)"},
        {"frameworks": ["Terraform"], "resource_types": ["aws_lambda_function"],
         "when": "present(environment.variables) and missing(kms_key_arn)"}
      ]
    },
    {
      "rule_id": "R-API-STAGE-LOGGING",
      "severity": "Medium",
      "description": "API stage without access logging",
      "remediation": "Configure access log settings with a destination log group.",
      "matchers": [
        {"frameworks": ["CloudFormation", "SAM"], "resource_types": ["AWS::ApiGateway::Stage"],
         "when": "missing(AccessLogSetting.DestinationArn)"},
        {"frameworks": ["CloudFormation", "SAM"], "resource_types": ["AWS::ApiGatewayV2::Stage"],
         "when": "missing(AccessLogSettings.DestinationArn)"},
        {"frameworks": ["SAM"], "resource_types": ["AWS::Serverless::Api"],
         "when": "missing(AccessLogSetting.DestinationArn)"},
        {"frameworks": ["SAM"], "resource_types": ["AWS::Serverless::HttpApi"],
         "when": "missing(AccessLogSettings.DestinationArn)"},
        {"frameworks": ["Terraform"], "resource_types": ["aws_api_gateway_stage", "aws_apigatewayv2_stage"],
         "when": "missing(access_log_settings.destination_arn)"}
      ]
    }
  ]
}
)json";
}

const MisconfigRule* Catalog::find(std::string_view rule_id) const {
  for (const auto& r : rules) {
    if (r.rule_id == rule_id) return &r;
  }
  return nullptr;
}

namespace {

[[noreturn]] void config_error(const std::string& msg) {
  throw Error(ErrorKind::kConfig, "IaC catalog: " + msg);
}

std::vector<std::string> string_list(const json& v, const std::string& what) {
  if (!v.is_array()) config_error(what + " must be an array of strings");
  std::vector<std::string> out;
  for (const auto& s : v) {
    if (!s.is_string()) config_error(what + " must be an array of strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

std::vector<std::string> lowered(std::vector<std::string> v) {
  for (auto& s : v) s = detail::normalize_key(s);
  return v;
}

}  // namespace

Catalog parse_catalog_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    config_error(std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) config_error("top level must be an object");
  Catalog cat;
  for (const auto& [key, value] : j.items()) {
    if (key == "rules") continue;
    if (key != "cors") config_error("unknown key '" + key + "'");
    if (!value.is_object()) config_error("cors must be an object");
    for (const auto& [ck, cv] : value.items()) {
      if (ck == "origin_key_markers") {
        cat.cors.origin_key_markers = lowered(string_list(cv, ck));
      } else if (ck == "auth_keys") {
        cat.cors.auth_keys = lowered(string_list(cv, ck));
      } else if (ck == "authorizer_types") {
        cat.cors.authorizer_types = string_list(cv, ck);
        for (auto& s : cat.cors.authorizer_types) s = to_lower(s);
      } else if (ck == "api_types") {
        cat.cors.api_types = string_list(cv, ck);
        for (auto& s : cat.cors.api_types) s = to_lower(s);
      } else {
        config_error("unknown cors key '" + ck + "'");
      }
    }
  }
  if (!j.contains("rules") || !j["rules"].is_array()) config_error("\"rules\" array is required");

  std::set<std::string> ids;
  for (const auto& item : j["rules"]) {
    if (!item.is_object()) config_error("each rule must be an object");
    MisconfigRule rule;
    try {
      for (const auto& [key, value] : item.items()) {
        if (key == "rule_id") {
          rule.rule_id = value.get<std::string>();
        } else if (key == "severity") {
          rule.severity = parse_severity(value.get<std::string>());
        } else if (key == "description") {
          rule.description = value.get<std::string>();
        } else if (key == "remediation") {
          rule.remediation = value.get<std::string>();
        } else if (key == "check") {
          rule.check = value.get<std::string>();
        } else if (key == "frameworks") {
          for (const auto& f : string_list(value, "frameworks")) {
            rule.frameworks.insert(parse_framework(f));
          }
        } else if (key == "matchers") {
          if (!value.is_array()) config_error("matchers must be an array");
          for (const auto& m : value) {
            Matcher matcher;
            for (const auto& [mk, mv] : m.items()) {
              if (mk == "frameworks") {
                for (const auto& f : string_list(mv, "frameworks")) {
                  matcher.frameworks.insert(parse_framework(f));
                }
              } else if (mk == "resource_types") {
                matcher.resource_types = string_list(mv, "resource_types");
              } else if (mk == "when") {
                matcher.when = Predicate::compile(mv.get<std::string>());
              } else {
                config_error("unknown matcher key '" + mk + "'");
              }
            }
            if (matcher.frameworks.empty() || matcher.resource_types.empty()) {
              config_error("matcher needs frameworks and resource_types");
            }
            rule.frameworks.insert(matcher.frameworks.begin(), matcher.frameworks.end());
            rule.matchers.push_back(std::move(matcher));
          }
        } else {
          config_error("unknown rule key '" + key + "'");
        }
      }
    } catch (const json::exception& e) {
      config_error(std::string("bad rule entry: ") + e.what());
    } catch (const ParseError& e) {
      config_error("rule '" + rule.rule_id + "': bad matcher at column " +
                   std::to_string(e.column()) + ": " + e.what());
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kConfig) throw;
      config_error("rule '" + rule.rule_id + "': " + e.what());
    }
    if (rule.rule_id.empty()) config_error("rule without rule_id");
    if (!ids.insert(rule.rule_id).second) config_error("duplicate rule_id '" + rule.rule_id + "'");
    if (!rule.check.empty() && rule.check != "cors-wildcard") {
      config_error("unknown check '" + rule.check + "'");
    }
    if (rule.check.empty() && rule.matchers.empty()) {
      config_error("rule '" + rule.rule_id + "' has neither matchers nor a check");
    }
    if (rule.check == "cors-wildcard" && rule.frameworks.empty()) {
      rule.frameworks = {kAllFrameworks[0], kAllFrameworks[1], kAllFrameworks[2]};
    }
    cat.rules.push_back(std::move(rule));
  }
  return cat;
}

Catalog default_catalog() {
  static const Catalog cat = parse_catalog_json(default_catalog_json());
  return cat;
}

Catalog load_catalog(const fs::path& path) { return parse_catalog_json(read_text_file(path)); }

namespace {

std::string span_location(const SourceSpan& span, std::string_view id) {
  return span.file + ":" + std::to_string(span.first_line) + "-" +
         std::to_string(span.last_line) + "/" + std::string(id);
}

bool contains_any(std::string_view haystack, const std::vector<std::string>& needles) {
  for (const auto& n : needles) {
    if (haystack.find(n) != std::string_view::npos) return true;
  }
  return false;
}

bool has_marker(std::string_view key, const CorsOptions& o) {
  return contains_any(detail::normalize_key(key), o.origin_key_markers);
}

bool is_auth_key(std::string_view key, const CorsOptions& o) {
  const std::string k = detail::normalize_key(key);
  return std::find(o.auth_keys.begin(), o.auth_keys.end(), k) != o.auth_keys.end();
}

bool is_wildcard(std::string_view value) {
  std::string_view v = trim(value);
  while (v.size() >= 2 && (v.front() == '\'' || v.front() == '"') && v.back() == v.front()) {
    v = trim(v.substr(1, v.size() - 2));
  }
  return v == "*";
}

bool inert_value(const Node& v) {
  if (v.is_null()) return true;
  if (v.is_scalar()) {
    const std::string_view s = trim(v.scalar);
    return s.empty() || iequals(s, "NONE") || iequals(s, "false");
  }
  if (v.is_map()) return v.fields.empty();
  if (v.is_list()) return v.items.empty();
  return false;
}

bool has_auth(const Node& n, const CorsOptions& o);

// An auth-keyed value counts when it names something other than NONE.
bool auth_value_counts(const Node& v, const CorsOptions& o) {
  if (inert_value(v)) return false;
  if (v.is_scalar() || v.is_ref()) return true;
  if (v.is_list()) {
    return std::any_of(v.items.begin(), v.items.end(),
                       [&](const Node& i) { return auth_value_counts(i, o); });
  }
  if (has_auth(v, o)) return true;
  for (const auto& [k, sub] : v.fields) {
    if (!is_auth_key(k, o) && !inert_value(sub)) return true;
  }
  return false;
}

bool has_auth(const Node& n, const CorsOptions& o) {
  if (n.is_list()) {
    return std::any_of(n.items.begin(), n.items.end(),
                       [&](const Node& i) { return has_auth(i, o); });
  }
  if (!n.is_map()) return false;
  for (const auto& [k, v] : n.fields) {
    if (is_auth_key(k, o) ? auth_value_counts(v, o) : has_auth(v, o)) return true;
  }
  return false;
}

bool token_in(std::string_view text, std::string_view id) {
  auto word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
  std::size_t pos = 0;
  while ((pos = text.find(id, pos)) != std::string_view::npos) {
    const bool left = pos == 0 || !word(text[pos - 1]);
    const std::size_t end = pos + id.size();
    const bool right = end >= text.size() || !word(text[end]);
    if (left && right) return true;
    ++pos;
  }
  return false;
}

bool references(const Node& n, std::string_view id) {
  if (n.is_ref()) {
    if (token_in(n.text(), id)) return true;
  }
  for (const auto& i : n.items) {
    if (references(i, id)) return true;
  }
  for (const auto& [k, v] : n.fields) {
    if (references(v, id)) return true;
  }
  return false;
}

bool type_has(std::string_view type, const std::vector<std::string>& fragments) {
  return contains_any(to_lower(type), fragments);
}

struct CorsSite {
  std::string path;
  std::string value;
  std::string param;  // set when the value came from a parameter default
};

// First wildcard origin under `n`.
std::optional<CorsSite> find_site(const Node& n, const std::string& path, bool origin_key,
                                  const TemplateModel& model, const CorsOptions& o,
                                  std::set<std::string>& used_params) {
  if (n.is_ref()) {
    const auto params = detail::referenced_params(n);
    bool cors_param = false;
    for (const auto& p : params) {
      if (model.parameters.count(p)) used_params.insert(p);
      if (has_marker(p, o)) cors_param = true;
    }
    if (origin_key || cors_param) {
      const auto value = detail::resolve_scalar(n, &model);
      if (value && is_wildcard(*value)) {
        return CorsSite{path, *value, params.empty() ? "" : *params.begin()};
      }
    }
    return std::nullopt;
  }
  if (n.is_scalar()) {
    if (origin_key && is_wildcard(n.scalar)) return CorsSite{path, n.scalar, ""};
    return std::nullopt;
  }
  std::optional<CorsSite> first;
  for (const auto& item : n.items) {
    auto s = find_site(item, path, origin_key, model, o, used_params);
    if (s && !first) first = std::move(s);
  }
  for (const auto& [k, v] : n.fields) {
    const bool key_origin =
        has_marker(k, o) || (iequals(k, "Cors") && (v.is_scalar() || v.is_ref()));
    auto s = find_site(v, path.empty() ? k : path + "." + k, key_origin, model, o, used_params);
    if (s && !first) first = std::move(s);
  }
  return first;
}

bool resource_group_authenticated(const ResourceNode& r, const TemplateModel& model,
                                  const CorsOptions& o) {
  std::set<std::string> group{r.logical_id};
  for (const auto& other : model.resources) {
    if (&other != &r && type_has(other.resource_type, o.api_types) &&
        references(r.properties, other.logical_id)) {
      group.insert(other.logical_id);
    }
  }
  for (const auto& other : model.resources) {
    const bool member = group.count(other.logical_id) > 0;
    bool linked = member;
    for (const auto& id : group) {
      if (!linked && references(other.properties, id)) linked = true;
    }
    if (!linked) continue;
    if (type_has(other.resource_type, o.authorizer_types)) return true;
    if (has_auth(other.properties, o)) return true;
  }
  return false;
}

std::string site_text(const CorsSite& s) {
  std::string out = s.path + " = " + s.value;
  if (!s.param.empty()) out += " (parameter " + s.param + ")";
  return out;
}

}  // namespace

std::vector<Finding> check_cors_wildcard(const TemplateModel& model, const CorsOptions& o,
                                         const ComponentRef& component, std::string_view rule_id,
                                         Severity severity) {
  std::vector<Finding> out;
  std::set<std::string> used_params;
  auto emit = [&](Severity sev, std::string location, std::string evidence) {
    out.push_back({std::string(rule_id), AttackVector::kV4, sev, component, std::move(location),
                   std::move(evidence),
                   "Restrict the allowed origin to known domains and require an authorizer on "
                   "the API."});
  };

  for (const auto& r : model.resources) {
    const auto site = find_site(r.properties, "", false, model, o, used_params);
    if (!site) continue;
    std::string evidence = r.resource_type + " " + r.logical_id + ": " + site_text(*site);
    Severity sev = Severity::kLow;
    if (!type_has(r.resource_type, o.api_types)) {
      evidence += "; not an API resource";
    } else if (resource_group_authenticated(r, model, o)) {
      evidence += "; API has authentication";
    } else {
      sev = severity;
      evidence += "; API has no authentication";
    }
    emit(sev, span_location(r.span, r.logical_id), evidence);
  }

  if (model.globals.is_map()) {
    for (const auto& [section, body] : model.globals.fields) {
      const auto site = find_site(body, section, false, model, o, used_params);
      if (!site) continue;
      const std::string serverless_type = "aws::serverless::" + to_lower(section);
      bool authenticated = has_auth(body, o);
      for (const auto& r : model.resources) {
        if (type_has(r.resource_type, o.authorizer_types) ||
            (to_lower(r.resource_type) == serverless_type && has_auth(r.properties, o))) {
          authenticated = true;
        }
      }
      const bool api = type_has(serverless_type, o.api_types);
      std::string evidence = "Globals." + site_text(*site);
      Severity sev = Severity::kLow;
      if (!api) {
        evidence += "; not an API section";
      } else if (authenticated) {
        evidence += "; API has authentication";
      } else {
        sev = severity;
        evidence += "; API has no authentication";
      }
      const int first = body.line;
      emit(sev,
           span_location({model.file, first, std::max(first, body.last_line())},
                         "Globals." + section),
           evidence);
    }
  }

  for (const auto& [name, p] : model.parameters) {
    if (used_params.count(name) || !has_marker(name, o)) continue;
    if (!p.default_value || !is_wildcard(*p.default_value)) continue;
    emit(Severity::kLow, span_location({model.file, p.line, p.line}, "Parameters." + name),
         "parameter " + name + " defaults to " + *p.default_value + "; not used by any resource");
  }
  std::sort(out.begin(), out.end(), finding_less);
  return out;
}

RuleRun run_rules(const TemplateModel& model, const Catalog& catalog,
                  const ComponentRef& component) {
  RuleRun run;
  for (const auto& rule : catalog.rules) {
    if (!rule.frameworks.count(model.framework)) continue;
    if (rule.check == "cors-wildcard") {
      auto f = check_cors_wildcard(model, catalog.cors, component, rule.rule_id, rule.severity);
      run.findings.insert(run.findings.end(), f.begin(), f.end());
      continue;
    }
    for (const auto& r : model.resources) {
      bool fired = false;
      for (const auto& m : rule.matchers) {
        if (fired) break;
        if (!m.frameworks.count(model.framework)) continue;
        if (std::find(m.resource_types.begin(), m.resource_types.end(), r.resource_type) ==
            m.resource_types.end()) {
          continue;
        }
        switch (m.when.evaluate(r.properties, &model)) {
          case Truth::kTrue:
            fired = true;
            run.findings.push_back({rule.rule_id, AttackVector::kV4, rule.severity, component,
                                    span_location(r.span, r.logical_id),
                                    r.resource_type + " " + r.logical_id + ": " + m.when.text(),
                                    rule.remediation});
            break;
          case Truth::kUndetermined:
            run.notices.push_back(span_location(r.span, r.logical_id) + ": " + rule.rule_id +
                                  " undetermined (unresolved reference)");
            break;
          case Truth::kFalse:
            break;
        }
      }
    }
  }
  std::sort(run.findings.begin(), run.findings.end(), finding_less);
  return run;
}

TemplateResult lint_template(const fs::path& path, std::string_view contents,
                             const Catalog& catalog, const ComponentRef& component,
                             std::string label) {
  TemplateResult result;
  result.file = label.empty() ? path.filename().generic_string() : std::move(label);
  result.framework = classify_template(path, contents, &result.notices);
  try {
    const TemplateModel model = parse_template(contents, result.framework, result.file);
    result.notices.insert(result.notices.end(), model.notices.begin(), model.notices.end());
    RuleRun run = run_rules(model, catalog, component);
    result.findings = std::move(run.findings);
    result.notices.insert(result.notices.end(), run.notices.begin(), run.notices.end());
  } catch (const ParseError& e) {
    result.error = result.file + ":" + std::to_string(e.line()) + ": " + e.what();
  }
  return result;
}

std::vector<TemplateResult> lint_directory(const fs::path& dir, const Catalog& catalog,
                                           const ComponentRef& component,
                                           std::string_view label_prefix) {
  std::vector<TemplateResult> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& path : list_files_sorted(dir)) {
    if (!is_template_extension(path)) continue;
    const std::string label =
        std::string(label_prefix) + fs::relative(path, dir).generic_string();
    out.push_back(lint_template(path, read_text_file(path), catalog, component, label));
  }
  return out;
}

SeverityHistogram severity_histogram(std::span<const TemplateResult> results) {
  SeverityHistogram h;
  for (auto s : kAllSeverities) {
    h.total[s] = 0;
    for (auto f : kAllFrameworks) h.per_framework[f][s] = 0;
  }
  for (const auto& r : results) {
    for (const auto& f : r.findings) {
      ++h.total[f.severity];
      ++h.per_framework[r.framework][f.severity];
    }
  }
  return h;
}

std::vector<RuleShare> rule_shares(std::span<const TemplateResult> results) {
  std::map<std::string, RuleShare> by_rule;
  std::uint64_t total_findings = 0;
  std::uint64_t parsed = 0;
  for (const auto& r : results) {
    if (r.error) continue;
    ++parsed;
    std::set<std::string> seen;
    for (const auto& f : r.findings) {
      ++total_findings;
      auto& share = by_rule[f.rule_id];
      share.rule_id = f.rule_id;
      ++share.findings;
      if (seen.insert(f.rule_id).second) ++share.templates;
    }
  }
  std::vector<RuleShare> out;
  for (auto& [id, s] : by_rule) {
    s.share_of_findings = static_cast<double>(s.findings) / static_cast<double>(total_findings);
    s.share_of_templates = static_cast<double>(s.templates) / static_cast<double>(parsed);
    out.push_back(s);
  }
  std::sort(out.begin(), out.end(), [](const RuleShare& a, const RuleShare& b) {
    if (a.findings != b.findings) return a.findings > b.findings;
    return a.rule_id < b.rule_id;
  });
  return out;
}

}  // namespace slsa::iac
