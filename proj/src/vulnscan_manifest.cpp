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

// Manifest and lockfile front-ends for the dependency inventory.

#include <algorithm>
#include <cctype>
#include <regex>

#include <nlohmann/json.hpp>

#include "slsa_audit/error.hpp"
#include "slsa_audit/util.hpp"
#include "slsa_audit/vulnscan.hpp"

namespace slsa::vulnscan {

using nlohmann::json;

std::string_view to_string(Ecosystem e) {
  switch (e) {
    case Ecosystem::kNpm: return "npm";
    case Ecosystem::kPypi: return "pypi";
    case Ecosystem::kGomod: return "gomod";
    case Ecosystem::kOsPackages: return "os-packages";
  }
  return "npm";
}

Ecosystem parse_ecosystem(std::string_view text) {
  const std::string t = to_lower(text);
  if (t == "npm") return Ecosystem::kNpm;
  if (t == "pypi") return Ecosystem::kPypi;
  if (t == "gomod" || t == "go") return Ecosystem::kGomod;
  if (t == "os-packages" || t == "os") return Ecosystem::kOsPackages;
  throw Error(ErrorKind::kFormat, "unknown ecosystem '" + std::string(text) + "'");
}

namespace {

// PEP 503 name normalization.
std::string normalize_pypi(std::string_view name) {
  std::string out;
  bool pending_sep = false;
  for (char c : name) {
    if (c == '-' || c == '_' || c == '.') {
      pending_sep = true;
      continue;
    }
    if (pending_sep && !out.empty()) out.push_back('-');
    pending_sep = false;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

std::string normalize_name(std::string_view name, Ecosystem eco) {
  if (eco == Ecosystem::kPypi) return normalize_pypi(name);
  return std::string(name);
}

// Fills missing/wildcard components of a partial version with zeros:
// "1" -> "1.0.0", "1.x" -> "1.0.0", "2.3.*" -> "2.3.0".
std::string complete_version(std::string_view v) {
  std::vector<std::string> parts;
  std::string cur;
  std::string_view tail;
  std::size_t i = 0;
  for (; i < v.size(); ++i) {
    const char c = v[i];
    if (c == '.') {
      parts.push_back(cur);
      cur.clear();
    } else if (c == '-' || c == '+') {
      break;
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  tail = v.substr(i);
  for (auto& p : parts) {
    if (p == "x" || p == "X" || p == "*" || p.empty()) p = "0";
  }
  while (parts.size() < 3) parts.push_back("0");
  std::string out;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    if (k) out.push_back('.');
    out += parts[k];
  }
  out += tail;
  return out;
}

// Smallest version strictly above v, approximated by bumping the last
// numeric release component.
std::string bump_version(const std::string& v) {
  std::string core = v.substr(0, v.find_first_of("-+"));
  auto dot = core.find_last_of('.');
  std::string last = dot == std::string::npos ? core : core.substr(dot + 1);
  if (last.empty() ||
      !std::all_of(last.begin(), last.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    return v;
  }
  const std::string bumped = std::to_string(std::stoull(last) + 1);
  return (dot == std::string::npos ? "" : core.substr(0, dot + 1)) + bumped;
}

std::string strip_v(std::string_view s) {
  s = trim(s);
  while (!s.empty() && (s.front() == '=' || s.front() == 'v' || s.front() == 'V')) {
    s.remove_prefix(1);
  }
  return std::string(trim(s));
}

struct Resolution {
  std::optional<std::string> version;
  bool unsupported = false;
};

// Minimum version satisfying an npm range expression.
Resolution resolve_npm_range(std::string_view spec) {
  spec = trim(spec);
  for (std::string_view prefix : {"npm:", "file:", "git", "http:", "https:",
                                  "link:", "workspace:", "github:"}) {
    if (spec.substr(0, prefix.size()) == prefix) return {std::nullopt, true};
  }
  if (spec.find('/') != std::string_view::npos) return {std::nullopt, true};
  if (spec.empty() || spec == "*" || spec == "latest" || spec == "x") return {};

  std::optional<std::string> best;
  std::optional<Version> best_v;
  std::size_t start = 0;
  while (start <= spec.size()) {
    auto bar = spec.find("||", start);
    std::string_view alt =
        trim(spec.substr(start, bar == std::string_view::npos ? std::string_view::npos : bar - start));
    std::optional<std::string> low;
    bool unconstrained = true;
    if (auto hy = alt.find(" - "); hy != std::string_view::npos) {
      low = complete_version(strip_v(alt.substr(0, hy)));
      unconstrained = false;
    } else {
      std::size_t p = 0;
      while (p < alt.size()) {
        while (p < alt.size() && std::isspace(static_cast<unsigned char>(alt[p]))) ++p;
        std::size_t q = p;
        while (q < alt.size() && !std::isspace(static_cast<unsigned char>(alt[q]))) ++q;
        std::string c(alt.substr(p, q - p));
        p = q;
        if (c.empty()) continue;
        // Operator may be separated from its version by a space.
        if ((c == ">=" || c == ">" || c == "<" || c == "<=" || c == "=" ||
             c == "^" || c == "~") && p < alt.size()) {
          while (p < alt.size() && std::isspace(static_cast<unsigned char>(alt[p]))) ++p;
          q = p;
          while (q < alt.size() && !std::isspace(static_cast<unsigned char>(alt[q]))) ++q;
          c += std::string(alt.substr(p, q - p));
          p = q;
        }
        if (c.rfind("<", 0) == 0) continue;
        if (c == "*" || c == "x" || c == "X") continue;
        std::string candidate;
        if (c.rfind(">=", 0) == 0) {
          candidate = complete_version(strip_v(c.substr(2)));
        } else if (c.rfind(">", 0) == 0) {
          candidate = bump_version(complete_version(strip_v(c.substr(1))));
        } else if (c.rfind("^", 0) == 0 || c.rfind("~", 0) == 0) {
          candidate = complete_version(strip_v(c.substr(c.size() > 1 && c[1] == '>' ? 2 : 1)));
        } else {
          candidate = complete_version(strip_v(c));
        }
        unconstrained = false;
        if (!low) {
          low = candidate;
        } else {
          auto a = Version::parse(*low);
          auto b = Version::parse(candidate);
          if (a && b && compare(*a, *b) < 0) low = candidate;
        }
      }
    }
    if (!unconstrained && !low) low = "0.0.0";
    if (low) {
      auto v = Version::parse(*low);
      if (v && (!best_v || compare(*v, *best_v) < 0)) {
        best = low;
        best_v = v;
      }
    } else if (unconstrained) {
      // One alternative with no lower bound makes 0.0.0 reachable.
      best = "0.0.0";
      best_v = Version::parse("0.0.0");
    }
    if (bar == std::string_view::npos) break;
    start = bar + 2;
  }
  return {best, false};
}

int line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

json parse_json_or_throw(const std::string& path, std::string_view contents) {
  try {
    return json::parse(contents);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what(),
                     line_of_offset(contents, e.byte > 0 ? e.byte - 1 : 0));
  }
}

std::string base_name(const std::string& path) {
  auto slash = path.find_last_of("/\\");
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

void parse_package_json(const std::string& path, std::string_view contents,
                        ManifestParse& out) {
  const json doc = parse_json_or_throw(path, contents);
  if (!doc.is_object()) throw ParseError(path + ": expected a JSON object", 1);
  // Installed package metadata (node_modules/<pkg>/package.json) records the
  // package itself.
  if (path.find("node_modules/") != std::string::npos) {
    if (doc.contains("name") && doc["name"].is_string() && doc.contains("version") &&
        doc["version"].is_string()) {
      out.inventory.add(doc["name"].get<std::string>(), Ecosystem::kNpm,
                        doc["version"].get<std::string>(), path);
    }
    return;
  }
  for (const char* section : {"dependencies", "devDependencies",
                              "optionalDependencies", "peerDependencies"}) {
    if (!doc.contains(section)) continue;
    const auto& deps = doc[section];
    if (!deps.is_object()) {
      throw ParseError(path + ": '" + section + "' must be an object", 1);
    }
    for (const auto& [name, range] : deps.items()) {
      if (!range.is_string()) {
        throw ParseError(path + ": dependency '" + name + "' range must be a string", 1);
      }
      auto res = resolve_npm_range(range.get<std::string>());
      if (res.unsupported) {
        out.notices.push_back(path + ": " + name + " uses a non-registry source '" +
                              range.get<std::string>() + "', skipped");
        continue;
      }
      if (!res.version) {
        out.notices.push_back(path + ": " + name + " is unconstrained ('" +
                              range.get<std::string>() + "'), not matched");
      }
      out.inventory.add(name, Ecosystem::kNpm, res.version, path);
    }
  }
}

void walk_lock_v1(const json& deps, const std::string& path, ManifestParse& out) {
  if (!deps.is_object()) return;
  for (const auto& [name, info] : deps.items()) {
    if (!info.is_object()) continue;
    if (info.contains("version") && info["version"].is_string()) {
      const std::string v = info["version"].get<std::string>();
      if (Version::parse(v)) {
        out.inventory.add(name, Ecosystem::kNpm, v, path);
      } else {
        out.notices.push_back(path + ": " + name + " locked to non-registry version '" +
                              v + "', skipped");
      }
    }
    if (info.contains("dependencies")) walk_lock_v1(info["dependencies"], path, out);
  }
}

void parse_package_lock(const std::string& path, std::string_view contents,
                        ManifestParse& out) {
  const json doc = parse_json_or_throw(path, contents);
  if (!doc.is_object()) throw ParseError(path + ": expected a JSON object", 1);
  if (doc.contains("packages") && doc["packages"].is_object()) {
    for (const auto& [key, info] : doc["packages"].items()) {
      if (key.empty() || !info.is_object()) continue;
      const auto nm = key.rfind("node_modules/");
      if (nm == std::string::npos) continue;
      std::string name = key.substr(nm + std::string("node_modules/").size());
      if (info.contains("name") && info["name"].is_string()) {
        name = info["name"].get<std::string>();
      }
      if (!info.contains("version") || !info["version"].is_string()) continue;
      const std::string v = info["version"].get<std::string>();
      if (Version::parse(v)) {
        out.inventory.add(name, Ecosystem::kNpm, v, path);
      } else {
        out.notices.push_back(path + ": " + name + " locked to non-registry version '" +
                              v + "', skipped");
      }
    }
    return;
  }
  if (doc.contains("dependencies")) walk_lock_v1(doc["dependencies"], path, out);
}

void parse_requirements(const std::string& path, std::string_view contents,
                        ManifestParse& out) {
  static const std::regex kLine(
      R"(^([A-Za-z0-9][A-Za-z0-9._-]*)\s*(\[[^\]]*\])?\s*(.*)$)");
  static const std::regex kSpec(R"(^\s*(===|==|~=|>=|<=|!=|>|<)\s*([^\s,]+)\s*$)");

  const auto lines = split_lines(contents);
  std::string pending;
  int pending_line = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string line = lines[i];
    if (pending.empty()) pending_line = static_cast<int>(i) + 1;
    // Comments start at '#' at line start or after whitespace.
    for (std::size_t k = 0; k < line.size(); ++k) {
      if (line[k] == '#' && (k == 0 || std::isspace(static_cast<unsigned char>(line[k - 1])))) {
        line.erase(k);
        break;
      }
    }
    std::string_view t = trim(line);
    if (!t.empty() && t.back() == '\\') {
      pending += std::string(t.substr(0, t.size() - 1)) + " ";
      continue;
    }
    std::string full = pending + std::string(t);
    pending.clear();
    std::string_view body = trim(full);
    if (body.empty()) continue;
    if (body.front() == '-' || body.find("://") != std::string_view::npos ||
        body.front() == '.' || body.front() == '/') {
      out.notices.push_back(path + ":" + std::to_string(pending_line) +
                            ": option or URL requirement skipped");
      continue;
    }
    if (auto semi = body.find(';'); semi != std::string_view::npos) {
      body = trim(body.substr(0, semi));
    }
    std::smatch m;
    const std::string body_s(body);
    if (!std::regex_match(body_s, m, kLine)) {
      throw ParseError(path + ": invalid requirement '" + body_s + "'", pending_line);
    }
    const std::string name = m[1].str();
    const std::string specs = m[3].str();
    std::optional<std::string> exact, lower;
    if (!trim(specs).empty()) {
      std::size_t start = 0;
      while (start <= specs.size()) {
        const auto comma = specs.find(',', start);
        const std::string one = specs.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        std::smatch sm;
        if (!std::regex_match(one, sm, kSpec)) {
          throw ParseError(path + ": invalid version specifier '" + std::string(trim(one)) + "'",
                           pending_line);
        }
        const std::string op = sm[1].str();
        const std::string ver = sm[2].str();
        if (op == "==" || op == "===") {
          exact = ver.find('*') != std::string::npos ? complete_version(ver) : ver;
        } else if (op == ">=" || op == "~=") {
          lower = ver;
        } else if (op == ">") {
          lower = bump_version(ver);
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
    }
    std::optional<std::string> version = exact ? exact : lower;
    if (!version) {
      if (trim(specs).empty()) {
        out.notices.push_back(path + ": " + name + " is unpinned, not matched");
      } else {
        version = "0";
      }
    }
    out.inventory.add(name, Ecosystem::kPypi, version, path);
  }
}

void parse_go_mod(const std::string& path, std::string_view contents, ManifestParse& out) {
  const auto lines = split_lines(contents);
  bool in_require = false;
  bool in_other_block = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string line = lines[i];
    if (auto c = line.find("//"); c != std::string::npos) line.erase(c);
    std::string_view t = trim(line);
    if (t.empty()) continue;
    const int line_no = static_cast<int>(i) + 1;

    std::string_view req;
    if (in_require || in_other_block) {
      if (t == ")") {
        in_require = in_other_block = false;
        continue;
      }
      if (in_other_block) continue;
      req = t;
    } else if (t.rfind("require", 0) == 0) {
      std::string_view rest = trim(t.substr(7));
      if (rest == "(") {
        in_require = true;
        continue;
      }
      req = rest;
    } else if (t.rfind("replace", 0) == 0 || t.rfind("exclude", 0) == 0 ||
               t.rfind("retract", 0) == 0) {
      if (t.back() == '(') in_other_block = true;
      continue;
    } else if (t.rfind("module", 0) == 0 || t.rfind("go ", 0) == 0 ||
               t.rfind("toolchain", 0) == 0) {
      continue;
    } else {
      throw ParseError(path + ": unexpected directive '" + std::string(t) + "'", line_no);
    }

    std::vector<std::string> toks;
    std::size_t p = 0;
    while (p < req.size()) {
      while (p < req.size() && std::isspace(static_cast<unsigned char>(req[p]))) ++p;
      std::size_t q = p;
      while (q < req.size() && !std::isspace(static_cast<unsigned char>(req[q]))) ++q;
      if (q > p) toks.emplace_back(req.substr(p, q - p));
      p = q;
    }
    if (toks.size() != 2) {
      throw ParseError(path + ": malformed require '" + std::string(req) + "'", line_no);
    }
    std::string v = toks[1];
    if (!v.empty() && v.front() == 'v') v.erase(0, 1);
    out.inventory.add(toks[0], Ecosystem::kGomod, v, path);
  }
  if (in_require) throw ParseError(path + ": unterminated require block", static_cast<int>(lines.size()));
}

void parse_os_packages(const std::string& path, std::string_view contents, ManifestParse& out) {
  const auto lines = split_lines(contents);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view t = trim(lines[i]);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 >= t.size()) {
      throw ParseError(path + ": expected name=version", static_cast<int>(i) + 1);
    }
    out.inventory.add(std::string(trim(t.substr(0, eq))), Ecosystem::kOsPackages,
                      std::string(trim(t.substr(eq + 1))), path);
  }
}

}  // namespace

void PackageInventory::add(const std::string& name, Ecosystem eco,
                           const std::optional<std::string>& version,
                           const std::string& declared_in) {
  const std::string key = normalize_name(name, eco);
  auto it = std::find_if(packages_.begin(), packages_.end(), [&](const Package& p) {
    return p.ecosystem == eco && p.name == key;
  });
  if (it == packages_.end()) {
    packages_.push_back(Package{key, eco, {}, {}, {}});
    it = std::prev(packages_.end());
  }
  if (version) it->versions.insert(*version);
  it->declared_in.insert(declared_in);
}

void PackageInventory::merge(const PackageInventory& other) {
  for (const auto& p : other.packages_) {
    for (const auto& file : p.declared_in) {
      if (p.versions.empty()) add(p.name, p.ecosystem, std::nullopt, file);
      for (const auto& v : p.versions) add(p.name, p.ecosystem, v, file);
    }
    auto it = std::find_if(packages_.begin(), packages_.end(), [&](const Package& q) {
      return q.ecosystem == p.ecosystem && q.name == p.name;
    });
    it->referenced_in_source.insert(p.referenced_in_source.begin(),
                                    p.referenced_in_source.end());
  }
}

bool is_manifest_file(std::string_view filename) {
  return filename == "package.json" || filename == "package-lock.json" ||
         filename == "requirements.txt" || filename == "go.mod" ||
         filename == "os-packages.txt";
}

ManifestParse parse_manifest(const std::string& path, std::string_view contents) {
  ManifestParse out;
  const std::string base = base_name(path);
  if (base == "package.json") {
    parse_package_json(path, contents, out);
  } else if (base == "package-lock.json") {
    parse_package_lock(path, contents, out);
  } else if (base == "requirements.txt") {
    parse_requirements(path, contents, out);
  } else if (base == "go.mod") {
    parse_go_mod(path, contents, out);
  } else if (base == "os-packages.txt") {
    parse_os_packages(path, contents, out);
  } else {
    out.notices.push_back(path + ": unsupported manifest kind, skipped");
  }
  return out;
}

ManifestParse collect_inventory(const fs::path& tree_root) {
  ManifestParse all;
  for (const auto& file : list_files_sorted(tree_root)) {
    if (!is_manifest_file(file.filename().string())) continue;
    const std::string rel = fs::relative(file, tree_root).generic_string();
    try {
      auto part = parse_manifest(rel, read_text_file(file));
      all.inventory.merge(part.inventory);
      all.notices.insert(all.notices.end(), part.notices.begin(), part.notices.end());
    } catch (const ParseError& e) {
      all.notices.push_back(rel + ": parse error at line " + std::to_string(e.line()) +
                            ": " + e.what());
    }
  }
  return all;
}

}  // namespace slsa::vulnscan
