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

#include "slsa_audit/dockerlint.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <map>
#include <nlohmann/json.hpp>
#include <set>

#include "slsa_audit/error.hpp"
#include "slsa_audit/util.hpp"

namespace slsa::docker {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

// Copies a `$( ... )` substitution verbatim, honoring nesting and quotes.
std::size_t copy_substitution(std::string_view s, std::size_t i, std::string& out) {
  const std::size_t start = i;
  int depth = 0;
  char quote = 0;
  for (; i < s.size(); ++i) {
    const char c = s[i];
    out.push_back(c);
    if (quote) {
      if (c == quote) quote = 0;
      continue;
    }
    if (c == '\'' || c == '"') {
      quote = c;
    } else if (c == '(') {
      ++depth;
    } else if (c == ')') {
      if (--depth == 0) return i + 1;
    }
  }
  throw ParseError("unterminated command substitution", 1, static_cast<int>(start + 1));
}

std::size_t copy_until(std::string_view s, std::size_t i, char close, std::string& out,
                       const char* what) {
  const std::size_t end = s.find(close, i + 1);
  if (end == std::string_view::npos) {
    throw ParseError(std::string("unterminated ") + what, 1, static_cast<int>(i + 1));
  }
  out.append(s.substr(i, end - i + 1));
  return end + 1;
}

}  // namespace

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    if (i >= s.size()) break;
    Token tok;
    tok.column = static_cast<int>(i + 1);
    const char first = s[i];
    if (first == '#') {
      while (i < s.size() && s[i] != '\n') ++i;
      continue;
    }
    if (first == ';' || first == '|' || first == '&') {
      tok.text.push_back(first);
      if ((first == '&' || first == '|') && i + 1 < s.size() && s[i + 1] == first) {
        tok.text.push_back(first);
      }
      i += tok.text.size();
      tok.is_operator = true;
      out.push_back(std::move(tok));
      continue;
    }
    while (i < s.size() && !is_space(s[i])) {
      const char c = s[i];
      if (c == ';' || c == '|') break;
      if (c == '&' && (tok.text.empty() || tok.text.back() != '>')) break;
      if (c == '\'') {
        const std::size_t close = s.find('\'', i + 1);
        if (close == std::string_view::npos) {
          throw ParseError("unterminated single quote", 1, static_cast<int>(i + 1));
        }
        tok.text.append(s.substr(i + 1, close - i - 1));
        i = close + 1;
      } else if (c == '"') {
        const std::size_t open = i;
        ++i;
        while (true) {
          if (i >= s.size()) {
            throw ParseError("unterminated double quote", 1, static_cast<int>(open + 1));
          }
          const char d = s[i];
          if (d == '"') {
            ++i;
            break;
          }
          if (d == '\\' && i + 1 < s.size() &&
              std::string_view("\"\\$`\n").find(s[i + 1]) != std::string_view::npos) {
            if (s[i + 1] != '\n') tok.text.push_back(s[i + 1]);
            i += 2;
          } else if (d == '$' && i + 1 < s.size() && s[i + 1] == '(') {
            i = copy_substitution(s, i, tok.text);
          } else if (d == '`') {
            i = copy_until(s, i, '`', tok.text, "backtick substitution");
          } else {
            tok.text.push_back(d);
            ++i;
          }
        }
      } else if (c == '\\') {
        if (i + 1 < s.size() && s[i + 1] != '\n') tok.text.push_back(s[i + 1]);
        i += 2;
      } else if (c == '$' && i + 1 < s.size() && s[i + 1] == '(') {
        i = copy_substitution(s, i, tok.text);
      } else if (c == '$' && i + 1 < s.size() && s[i + 1] == '{') {
        i = copy_until(s, i, '}', tok.text, "parameter expansion");
      } else if (c == '`') {
        i = copy_until(s, i, '`', tok.text, "backtick substitution");
      } else {
        tok.text.push_back(c);
        ++i;
      }
    }
    out.push_back(std::move(tok));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Command prefix and splitting

namespace {

std::vector<std::string_view> words(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    const std::size_t start = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

// Index of the first token after `[sudo [-flags]] docker [container] run`,
// or nullopt when the sequence does not start a run command.
template <typename Seq, typename Get>
std::optional<std::size_t> run_prefix_length(const Seq& seq, Get get) {
  std::size_t i = 0;
  if (i < seq.size() && get(seq[i]) == "sudo") {
    ++i;
    while (i < seq.size() && !get(seq[i]).empty() && get(seq[i]).front() == '-') ++i;
  }
  if (i >= seq.size() || get(seq[i]) != "docker") return std::nullopt;
  ++i;
  if (i < seq.size() && get(seq[i]) == "container") ++i;
  if (i >= seq.size() || get(seq[i]) != "run") return std::nullopt;
  return i + 1;
}

bool starts_run_command(std::string_view line) {
  auto w = words(line);
  if (!w.empty() && w.front() == "$") w.erase(w.begin());
  return run_prefix_length(w, [](std::string_view x) { return x; }).has_value();
}

bool looks_like_flag_line(std::string_view line) {
  const std::string_view t = trim(line);
  if (t.size() < 2 || t[0] != '-') return false;
  const char c = t[1] == '-' ? (t.size() > 2 ? t[2] : ' ') : t[1];
  return std::isalpha(static_cast<unsigned char>(c)) != 0;
}

std::string strip_prompt(std::string_view line) {
  std::string_view t = trim(line);
  if (t.size() >= 2 && t[0] == '$' && is_space(t[1])) t = trim(t.substr(1));
  return std::string(t);
}

bool has_image(std::string_view command) {
  try {
    parse_run_command(command);
    return true;
  } catch (const Error&) {
    return false;
  }
}

}  // namespace

std::vector<RunCommand> split_commands(std::string_view text) {
  // Physical lines joined across backslash continuations first.
  struct Logical {
    std::string text;
    int line;
  };
  std::vector<Logical> logical;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string joined;
    const int start = static_cast<int>(i + 1);
    while (true) {
      std::string_view l = lines[i];
      while (!l.empty() && (l.back() == ' ' || l.back() == '\t')) l.remove_suffix(1);
      if (!l.empty() && l.back() == '\\' && i + 1 < lines.size()) {
        l.remove_suffix(1);
        joined.append(l);
        joined.push_back(' ');
        ++i;
        continue;
      }
      joined.append(l);
      break;
    }
    logical.push_back({joined, start});
  }

  std::vector<RunCommand> out;
  for (std::size_t i = 0; i < logical.size(); ++i) {
    if (!starts_run_command(logical[i].text)) continue;
    RunCommand cmd{strip_prompt(logical[i].text), logical[i].line};
    while (i + 1 < logical.size()) {
      const std::string& next = logical[i + 1].text;
      if (trim(next).empty() || starts_run_command(next)) break;
      if (!looks_like_flag_line(next) && has_image(cmd.text)) break;
      cmd.text += ' ';
      cmd.text += std::string(trim(next));
      ++i;
    }
    out.push_back(std::move(cmd));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

enum class FlagKind { kBool, kValue };

const std::map<std::string, FlagKind, std::less<>>& long_flags() {
  static const std::map<std::string, FlagKind, std::less<>> m = [] {
    std::map<std::string, FlagKind, std::less<>> f;
    for (const char* name :
         {"add-host", "annotation", "attach", "blkio-weight", "blkio-weight-device", "cap-add",
          "cap-drop", "cgroup-parent", "cgroupns", "cidfile", "cpu-count", "cpu-percent",
          "cpu-period", "cpu-quota", "cpu-rt-period", "cpu-rt-runtime", "cpu-shares", "cpus",
          "cpuset-cpus", "cpuset-mems", "detach-keys", "device", "device-cgroup-rule",
          "device-read-bps", "device-read-iops", "device-write-bps", "device-write-iops",
          "dns", "dns-opt", "dns-option", "dns-search", "domainname", "entrypoint", "env",
          "env-file", "expose", "gpus", "group-add", "health-cmd", "health-interval",
          "health-retries", "health-start-interval", "health-start-period", "health-timeout",
          "hostname", "ip", "ip6", "ipc", "isolation", "kernel-memory", "label", "label-file",
          "link", "link-local-ip", "log-driver", "log-opt", "mac-address", "memory",
          "memory-reservation", "memory-swap", "memory-swappiness", "mount", "name", "net",
          "net-alias", "network", "network-alias", "oom-score-adj", "pid", "pids-limit",
          "platform", "publish", "pull", "restart", "runtime", "security-opt", "shm-size",
          "stop-signal", "stop-timeout", "storage-opt", "sysctl", "tmpfs", "ulimit", "user",
          "userns", "uts", "volume", "volume-driver", "volumes-from", "workdir"}) {
      f.emplace(name, FlagKind::kValue);
    }
    for (const char* name :
         {"detach", "disable-content-trust", "help", "init", "interactive", "no-healthcheck",
          "oom-kill-disable", "privileged", "publish-all", "quiet", "read-only", "rm",
          "sig-proxy", "tty", "use-api-socket"}) {
      f.emplace(name, FlagKind::kBool);
    }
    return f;
  }();
  return m;
}

std::optional<std::string_view> short_to_long(char c) {
  switch (c) {
    case 'a': return "attach";
    case 'c': return "cpu-shares";
    case 'd': return "detach";
    case 'e': return "env";
    case 'h': return "hostname";
    case 'i': return "interactive";
    case 'l': return "label";
    case 'm': return "memory";
    case 'P': return "publish-all";
    case 'p': return "publish";
    case 'q': return "quiet";
    case 't': return "tty";
    case 'u': return "user";
    case 'v': return "volume";
    case 'w': return "workdir";
    default: return std::nullopt;
  }
}

bool bool_value(std::optional<std::string_view> v) {
  if (!v) return true;
  return !(iequals(*v, "false") || *v == "0");
}

std::vector<std::string> split_on(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos
                                                                     : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

VolumeSpec parse_volume(std::string_view value, std::size_t token_index) {
  VolumeSpec v;
  v.token_index = token_index;
  const auto parts = split_on(value, ':');
  if (parts.size() == 1) {
    v.destination = parts[0];
  } else {
    v.source = parts[0];
    v.destination = parts[1];
    if (parts.size() > 2) {
      std::string opts;
      for (std::size_t i = 2; i < parts.size(); ++i) {
        if (i > 2) opts += ':';
        opts += parts[i];
      }
      v.options = opts;
    }
  }
  return v;
}

std::optional<VolumeSpec> parse_mount(std::string_view value, std::size_t token_index) {
  VolumeSpec v;
  v.token_index = token_index;
  std::string type = "volume";
  std::string opts;
  for (const auto& field : split_on(value, ',')) {
    const auto eq = field.find('=');
    const std::string key = to_lower(field.substr(0, eq));
    const std::string val = eq == std::string::npos ? "" : field.substr(eq + 1);
    if (key == "type") {
      type = to_lower(val);
    } else if (key == "source" || key == "src") {
      v.source = val;
    } else if (key == "target" || key == "destination" || key == "dst") {
      v.destination = val;
    } else {
      if (!opts.empty()) opts += ',';
      opts += field;
    }
  }
  if (type == "tmpfs") return std::nullopt;
  if (!opts.empty()) v.options = opts;
  return v;
}

class RunParser {
 public:
  RunParser(std::vector<Token> tokens, DockerRunSpec& spec) : t_(std::move(tokens)), spec_(spec) {}

  void parse() {
    const auto prefix =
        run_prefix_length(t_, [](const Token& tok) -> std::string_view { return tok.text; });
    if (!prefix) {
      throw ParseError("not a docker run command", 1, t_.empty() ? 1 : t_.front().column);
    }
    i_ = *prefix;
    while (i_ < t_.size()) {
      const std::string& tok = t_[i_].text;
      if (tok == "--") {
        ++i_;
        break;
      }
      if (tok.size() > 2 && tok.compare(0, 2, "--") == 0) {
        long_flag(tok);
      } else if (tok.size() > 1 && tok[0] == '-') {
        short_cluster(tok);
      } else {
        break;
      }
    }
    if (i_ >= t_.size()) {
      throw Error(ErrorKind::kIncompleteCommand, "docker run command has no image");
    }
    spec_.image = t_[i_].text;
    for (++i_; i_ < t_.size(); ++i_) spec_.command_args.push_back(t_[i_].text);
  }

 private:
  std::string take_value(std::string_view flag) {
    if (i_ + 1 >= t_.size()) {
      throw Error(ErrorKind::kIncompleteCommand,
                  "flag " + std::string(flag) + " expects a value");
    }
    return t_[++i_].text;
  }

  void long_flag(const std::string& tok) {
    const auto eq = tok.find('=');
    const std::string name = tok.substr(2, eq == std::string::npos ? std::string::npos : eq - 2);
    std::optional<std::string> inline_value;
    if (eq != std::string::npos) inline_value = tok.substr(eq + 1);
    const std::size_t flag_index = i_;
    const auto it = long_flags().find(name);
    if (it == long_flags().end()) {
      spec_.warnings.push_back("unknown flag --" + name);
      ++i_;
      return;
    }
    if (it->second == FlagKind::kBool) {
      apply_bool(name, inline_value);
      ++i_;
      return;
    }
    std::string value = inline_value ? *inline_value : take_value("--" + name);
    apply_value(name, value, inline_value ? flag_index : i_);
    ++i_;
  }

  void short_cluster(const std::string& tok) {
    const std::size_t flag_index = i_;
    for (std::size_t k = 1; k < tok.size(); ++k) {
      const auto name = short_to_long(tok[k]);
      if (!name) {
        spec_.warnings.push_back("unknown flag -" + std::string(1, tok[k]) + " in " + tok);
        break;
      }
      if (long_flags().at(std::string(*name)) == FlagKind::kBool) {
        apply_bool(*name, std::nullopt);
        continue;
      }
      std::string rest = tok.substr(k + 1);
      if (!rest.empty() && rest[0] == '=') rest.erase(0, 1);
      if (!rest.empty()) {
        apply_value(*name, rest, flag_index);
      } else {
        const std::string value = take_value("-" + std::string(1, tok[k]));
        apply_value(*name, value, i_);
      }
      break;
    }
    ++i_;
  }

  void apply_bool(std::string_view name, const std::optional<std::string>& value) {
    const bool on = bool_value(value ? std::optional<std::string_view>(*value) : std::nullopt);
    if (name == "detach") spec_.detach = on;
    if (name == "privileged") spec_.privileged = on;
  }

  void apply_value(std::string_view name, const std::string& value, std::size_t token_index) {
    if (name == "env") {
      const auto eq = value.find('=');
      EnvSpec e;
      e.token_index = token_index;
      e.key = value.substr(0, eq);
      if (eq != std::string::npos) e.value = value.substr(eq + 1);
      spec_.env.push_back(std::move(e));
    } else if (name == "volume") {
      spec_.volumes.push_back(parse_volume(value, token_index));
    } else if (name == "mount") {
      if (auto v = parse_mount(value, token_index)) spec_.volumes.push_back(std::move(*v));
    } else if (name == "publish") {
      spec_.ports.push_back(value);
    } else if (name == "name") {
      spec_.name = value;
    } else if (name == "pid") {
      spec_.pid_mode = value;
    } else if (name == "env-file") {
      spec_.warnings.push_back("env file not inspected: " + value);
    }
  }

  std::vector<Token> t_;
  DockerRunSpec& spec_;
  std::size_t i_ = 0;
};

}  // namespace

DockerRunSpec parse_run_command(std::string_view command) {
  std::string cmd = strip_prompt(command);
  std::vector<Token> tokens = tokenize(cmd);
  DockerRunSpec spec;
  const auto op = std::find_if(tokens.begin(), tokens.end(),
                               [](const Token& t) { return t.is_operator; });
  if (op != tokens.end()) {
    spec.warnings.push_back("ignored shell text after '" + op->text + "' at column " +
                            std::to_string(op->column));
    tokens.erase(op, tokens.end());
  }
  for (const auto& t : tokens) spec.raw_tokens.push_back(t.text);
  RunParser(std::move(tokens), spec).parse();
  return spec;
}

// ---------------------------------------------------------------------------
// Rules

std::string_view to_string(RuleClass c) {
  switch (c) {
    case RuleClass::kHostMount: return "HostMount";
    case RuleClass::kPrivileged: return "Privileged";
    case RuleClass::kPidHost: return "PidHost";
    case RuleClass::kHardcodedCredential: return "HardcodedCredential";
    case RuleClass::kSensitiveEnvVar: return "SensitiveEnvVar";
    case RuleClass::kDockerSockMount: return "DockerSockMount";
  }
  return "?";
}

RuleClass parse_rule_class(std::string_view text) {
  for (auto c : kAllRuleClasses) {
    if (iequals(text, to_string(c))) return c;
  }
  throw Error(ErrorKind::kConfig, "unknown docker rule class '" + std::string(text) + "'");
}

const SensitiveParamRule& DockerRules::rule(RuleClass c) const {
  for (const auto& r : rules) {
    if (r.rule_class == c) return r;
  }
  throw Error(ErrorKind::kConfig, "no rule configured for class " + std::string(to_string(c)));
}

DockerRules default_rules() {
  DockerRules r;
  r.rules = {
      {"DOCKER-HOST-MOUNT", RuleClass::kHostMount, Severity::kMedium, true},
      {"DOCKER-PRIVILEGED", RuleClass::kPrivileged, Severity::kCritical, true},
      {"DOCKER-PID-HOST", RuleClass::kPidHost, Severity::kHigh, true},
      {"DOCKER-HARDCODED-CREDENTIAL", RuleClass::kHardcodedCredential, Severity::kCritical, true},
      {"DOCKER-SENSITIVE-ENV", RuleClass::kSensitiveEnvVar, Severity::kHigh, true},
      {"DOCKER-SOCK-MOUNT", RuleClass::kDockerSockMount, Severity::kCritical, true},
  };
  r.sensitive_key_patterns = {"SECRET",  "TOKEN",       "PASSWORD",   "PASSWD",
                              "ACCESS_KEY", "API_KEY", "PRIVATE_KEY", "CREDENTIAL"};
  r.sensitive_exact_keys = {"AWS_ACCESS_KEY_ID", "AWS_SECRET_ACCESS_KEY", "AWS_SESSION_TOKEN",
                            "AWS_KEY", "AWS_SECRET"};
  r.access_key_prefixes = {"AKIA"};
  return r;
}

DockerRules parse_rules_json(std::string_view text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::kConfig, std::string("docker rules file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::kConfig, "docker rules file must be a JSON object");
  DockerRules r = default_rules();
  auto string_list = [&](const json& v, const std::string& key) {
    if (!v.is_array()) throw Error(ErrorKind::kConfig, key + " must be an array of strings");
    std::vector<std::string> out;
    for (const auto& s : v) {
      if (!s.is_string()) throw Error(ErrorKind::kConfig, key + " must be an array of strings");
      out.push_back(s.get<std::string>());
    }
    return out;
  };
  for (const auto& [key, value] : j.items()) {
    if (key == "sensitive_key_patterns") {
      r.sensitive_key_patterns = string_list(value, key);
    } else if (key == "sensitive_exact_keys") {
      r.sensitive_exact_keys = string_list(value, key);
    } else if (key == "access_key_prefixes") {
      r.access_key_prefixes = string_list(value, key);
    } else if (key == "entropy_threshold") {
      if (!value.is_number() || value.get<double>() < 0) {
        throw Error(ErrorKind::kConfig, "entropy_threshold must be a non-negative number");
      }
      r.entropy_threshold = value.get<double>();
    } else if (key == "min_secret_length") {
      if (!value.is_number_unsigned() || value.get<std::size_t>() == 0) {
        throw Error(ErrorKind::kConfig, "min_secret_length must be a positive integer");
      }
      r.min_secret_length = value.get<std::size_t>();
    } else if (key == "rules") {
      if (!value.is_array()) throw Error(ErrorKind::kConfig, "rules must be an array");
      for (const auto& item : value) {
        if (!item.is_object() || !item.contains("class") || !item["class"].is_string()) {
          throw Error(ErrorKind::kConfig, "each rule needs a string \"class\"");
        }
        const RuleClass cls = parse_rule_class(item["class"].get<std::string>());
        auto it = std::find_if(r.rules.begin(), r.rules.end(),
                               [&](const SensitiveParamRule& x) { return x.rule_class == cls; });
        try {
          if (item.contains("rule_id")) it->rule_id = item["rule_id"].get<std::string>();
          if (item.contains("severity")) {
            it->severity = parse_severity(item["severity"].get<std::string>());
          }
          if (item.contains("enabled")) it->enabled = item["enabled"].get<bool>();
        } catch (const json::exception& e) {
          throw Error(ErrorKind::kConfig, std::string("bad rule entry: ") + e.what());
        } catch (const Error& e) {
          throw Error(ErrorKind::kConfig, std::string("bad rule entry: ") + e.what());
        }
      }
    } else {
      throw Error(ErrorKind::kConfig, "unknown docker rules key '" + key + "'");
    }
  }
  return r;
}

DockerRules load_rules(const std::filesystem::path& path) {
  return parse_rules_json(read_text_file(path));
}

bool is_sensitive_key(std::string_view key, const DockerRules& rules) {
  for (const auto& exact : rules.sensitive_exact_keys) {
    if (iequals(key, exact)) return true;
  }
  for (const auto& pattern : rules.sensitive_key_patterns) {
    if (icontains(key, pattern)) return true;
  }
  return false;
}

double shannon_entropy(std::string_view s) {
  if (s.empty()) return 0.0;
  std::array<std::size_t, 256> counts{};
  for (unsigned char c : s) ++counts[c];
  double h = 0.0;
  const double n = static_cast<double>(s.size());
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / n;
    h -= p * std::log2(p);
  }
  return h;
}

std::vector<std::size_t> find_access_key_ids(std::string_view text, const DockerRules& rules) {
  auto key_char = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'); };
  std::vector<std::size_t> out;
  for (const auto& prefix : rules.access_key_prefixes) {
    if (prefix.empty()) continue;
    std::size_t pos = 0;
    while ((pos = text.find(prefix, pos)) != std::string_view::npos) {
      const std::size_t end = pos + prefix.size() + 16;
      const bool bounded_left = pos == 0 || !key_char(text[pos - 1]);
      bool ok = bounded_left && end <= text.size();
      for (std::size_t k = pos + prefix.size(); ok && k < end; ++k) ok = key_char(text[k]);
      if (ok && end < text.size() && key_char(text[end])) ok = false;
      if (ok) out.push_back(pos);
      ++pos;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string redact(std::string_view value) {
  if (value.size() <= 8) return "\u2026";
  return std::string(value.substr(0, 4)) + "\u2026";
}

namespace {

bool is_docker_socket(std::string_view source) {
  std::string s;
  for (char c : source) {
    if (c == '/' && !s.empty() && s.back() == '/') continue;
    s.push_back(c);
  }
  while (s.size() > 1 && s.back() == '/') s.pop_back();
  return s == "/var/run/docker.sock" || s == "/run/docker.sock";
}

bool is_host_path(std::string_view source) {
  if (source.empty()) return false;
  const char c = source.front();
  return c == '/' || c == '$' || c == '~' || c == '`';
}

std::string volume_text(const VolumeSpec& v) {
  std::string s = v.source.empty() ? v.destination : v.source + ":" + v.destination;
  if (v.options) s += ":" + *v.options;
  return s;
}

const char* remediation_for(RuleClass c) {
  switch (c) {
    case RuleClass::kHostMount:
      return "Mount only the specific paths the container needs, read-only where possible, or "
             "use a named volume.";
    case RuleClass::kPrivileged:
      return "Drop --privileged and grant individual capabilities with --cap-add.";
    case RuleClass::kPidHost:
      return "Remove --pid=host so the container keeps its own process namespace.";
    case RuleClass::kHardcodedCredential:
      return "Remove the credential from the command, rotate it, and pass it with Docker "
             "secrets (--secret) instead.";
    case RuleClass::kSensitiveEnvVar:
      return "Pass the value with Docker secrets instead of -e; environment values are "
             "visible through docker inspect.";
    case RuleClass::kDockerSockMount:
      return "Do not mount the Docker daemon socket; it gives the container control of the "
             "host's container runtime.";
  }
  return "";
}

}  // namespace

std::vector<Finding> check_sensitive(const DockerRunSpec& spec, const DockerRules& rules,
                                     const ComponentRef& component, std::string_view location) {
  std::vector<Finding> out;
  std::vector<std::string> secrets;
  auto loc = [&](const std::string& suffix) {
    return location.empty() ? suffix : std::string(location) + "/" + suffix;
  };
  auto emit = [&](RuleClass c, const std::string& where, std::string evidence) {
    const auto& rule = rules.rule(c);
    if (!rule.enabled) return;
    out.push_back({rule.rule_id, AttackVector::kV3, rule.severity, component, loc(where),
                   std::move(evidence), remediation_for(c)});
  };

  for (std::size_t i = 0; i < spec.volumes.size(); ++i) {
    const auto& v = spec.volumes[i];
    const std::string where = "volume/" + std::to_string(i + 1);
    if (is_docker_socket(v.source)) {
      emit(RuleClass::kDockerSockMount, where, "-v " + volume_text(v));
    } else if (is_host_path(v.source)) {
      emit(RuleClass::kHostMount, where, "-v " + volume_text(v));
    }
  }
  if (spec.privileged) emit(RuleClass::kPrivileged, "privileged", "--privileged");
  if (spec.pid_mode && iequals(*spec.pid_mode, "host")) {
    emit(RuleClass::kPidHost, "pid", "--pid=" + *spec.pid_mode);
  }

  std::set<std::size_t> env_tokens;
  for (const auto& e : spec.env) {
    env_tokens.insert(e.token_index);
    const bool sensitive = is_sensitive_key(e.key, rules);
    bool hardcoded = false;
    if (e.value && !e.value->empty() && e.value->front() != '$') {
      const auto ids = find_access_key_ids(*e.value, rules);
      for (auto pos : ids) secrets.push_back(e.value->substr(pos, 20));
      if (!ids.empty()) {
        hardcoded = true;
      } else if (sensitive && e.value->size() >= rules.min_secret_length &&
                 shannon_entropy(*e.value) >= rules.entropy_threshold) {
        hardcoded = true;
      }
      if (hardcoded) secrets.push_back(*e.value);
    }
    const std::string where = "env/" + e.key;
    if (hardcoded) {
      emit(RuleClass::kHardcodedCredential, where, "-e " + e.key + "=" + redact(*e.value));
    } else if (sensitive) {
      std::string evidence = "-e " + e.key;
      if (e.value) {
        evidence += "=";
        evidence += e.value->empty() || e.value->front() == '$' ? *e.value : redact(*e.value);
      }
      emit(RuleClass::kSensitiveEnvVar, where, evidence);
    }
  }

  for (std::size_t i = 0; i < spec.raw_tokens.size(); ++i) {
    if (env_tokens.count(i)) continue;
    const std::string& tok = spec.raw_tokens[i];
    for (auto pos : find_access_key_ids(tok, rules)) {
      const std::string id = tok.substr(pos, 20);
      secrets.push_back(id);
      emit(RuleClass::kHardcodedCredential, "token/" + std::to_string(i), redact(id));
    }
  }

  // No evidence may carry a detected secret, whichever rule produced it.
  for (auto& f : out) {
    for (const auto& secret : secrets) {
      std::size_t pos;
      while ((pos = f.evidence.find(secret)) != std::string::npos) {
        f.evidence.replace(pos, secret.size(), redact(secret));
      }
    }
  }
  return out;
}

LintResult lint_text(std::string_view text, const DockerRules& rules,
                     const ComponentRef& component, std::string_view file_label) {
  LintResult result;
  const auto commands = split_commands(text);
  result.commands = commands.size();
  for (std::size_t i = 0; i < commands.size(); ++i) {
    const std::string location = std::string(file_label) + "#" + std::to_string(i + 1);
    try {
      const DockerRunSpec spec = parse_run_command(commands[i].text);
      for (const auto& w : spec.warnings) {
        result.notices.push_back(location + " (line " + std::to_string(commands[i].line) +
                                 "): " + w);
      }
      auto findings = check_sensitive(spec, rules, component, location);
      result.findings.insert(result.findings.end(), findings.begin(), findings.end());
    } catch (const ParseError& e) {
      result.notices.push_back(location + " (line " + std::to_string(commands[i].line) +
                               ", column " + std::to_string(e.column()) + "): " + e.what());
    } catch (const Error& e) {
      result.notices.push_back(location + " (line " + std::to_string(commands[i].line) +
                               "): " + e.what());
    }
  }
  return result;
}

}  // namespace slsa::docker
