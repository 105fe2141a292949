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

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "slsa_audit/model.hpp"

namespace slsa::docker {

struct VolumeSpec {
  std::string source;  // empty for anonymous volumes
  std::string destination;
  std::optional<std::string> options;
  std::size_t token_index = 0;

  bool operator==(const VolumeSpec&) const = default;
};

struct EnvSpec {
  std::string key;
  std::optional<std::string> value;  // nullopt for `-e KEY` passthrough
  std::size_t token_index = 0;

  bool operator==(const EnvSpec&) const = default;
};

struct DockerRunSpec {
  std::string image;
  bool detach = false;
  std::optional<std::string> name;
  std::vector<VolumeSpec> volumes;
  std::vector<EnvSpec> env;
  std::vector<std::string> ports;
  bool privileged = false;
  std::optional<std::string> pid_mode;
  std::vector<std::string> command_args;  // after the image
  // Every token of the command with quotes removed, `docker run` included.
  std::vector<std::string> raw_tokens;
  std::vector<std::string> warnings;
};

struct Token {
  std::string text;
  int column = 0;  // 1-based, start of the token in the command
  bool is_operator = false;
};

// Shell-style split: quotes and backslashes are honored, `$VAR`, `${VAR}`,
// `$(...)` and backticks are kept verbatim. Throws ParseError (with column)
// on an unterminated quote or substitution.
std::vector<Token> tokenize(std::string_view command);

struct RunCommand {
  std::string text;
  int line = 0;  // 1-based line where the command starts
};

// Logical `docker run` commands. Backslash-newline joins lines. A command
// whose image has not appeared yet also absorbs the following lines, as do
// lines that start with a flag; a blank line always ends it.
std::vector<RunCommand> split_commands(std::string_view text);

// Throws ParseError for bad quoting or a command that is not `docker run`,
// and Error(kIncompleteCommand) when no image is given.
DockerRunSpec parse_run_command(std::string_view command);

// ---------------------------------------------------------------------------
// Rules

enum class RuleClass {
  kHostMount,
  kPrivileged,
  kPidHost,
  kHardcodedCredential,
  kSensitiveEnvVar,
  kDockerSockMount,
};

inline constexpr RuleClass kAllRuleClasses[] = {
    RuleClass::kHostMount,           RuleClass::kPrivileged,      RuleClass::kPidHost,
    RuleClass::kHardcodedCredential, RuleClass::kSensitiveEnvVar, RuleClass::kDockerSockMount};

std::string_view to_string(RuleClass c);
RuleClass parse_rule_class(std::string_view text);

struct SensitiveParamRule {
  std::string rule_id;
  RuleClass rule_class = RuleClass::kHostMount;
  Severity severity = Severity::kUnknown;
  bool enabled = true;
};

struct DockerRules {
  std::vector<SensitiveParamRule> rules;
  // Case-insensitive substrings of sensitive env keys.
  std::vector<std::string> sensitive_key_patterns;
  // Case-insensitive exact key names.
  std::vector<std::string> sensitive_exact_keys;
  std::vector<std::string> access_key_prefixes;
  double entropy_threshold = 3.0;
  std::size_t min_secret_length = 16;

  const SensitiveParamRule& rule(RuleClass c) const;
};

DockerRules default_rules();
// JSON object; any key omitted keeps its default. Throws Error(kConfig).
DockerRules parse_rules_json(std::string_view text);
DockerRules load_rules(const std::filesystem::path& path);

bool is_sensitive_key(std::string_view key, const DockerRules& rules);
double shannon_entropy(std::string_view s);
// Positions of `<prefix>` + 16 uppercase alphanumerics, bounded on both sides.
std::vector<std::size_t> find_access_key_ids(std::string_view text, const DockerRules& rules);
// First 4 characters + "…"; values of 8 characters or fewer are fully hidden.
std::string redact(std::string_view value);

// Findings for one parsed command. `location` prefixes every finding
// location, e.g. "run_commands.txt#2".
std::vector<Finding> check_sensitive(const DockerRunSpec& spec, const DockerRules& rules,
                                     const ComponentRef& component = {},
                                     std::string_view location = "");

struct LintResult {
  std::vector<Finding> findings;
  std::vector<std::string> notices;
  std::size_t commands = 0;
};

// split + parse + check over a whole run_commands.txt body. Commands that
// fail to parse become notices.
LintResult lint_text(std::string_view text, const DockerRules& rules,
                     const ComponentRef& component = {},
                     std::string_view file_label = "run_commands.txt");

}  // namespace slsa::docker
