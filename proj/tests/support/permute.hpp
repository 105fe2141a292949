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

// Key-order shufflers for IaC templates. JSON objects and YAML mappings are
// shuffled at every level; Terraform at top level and inside each block.
#pragma once

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace permute {

inline void shuffle_json(nlohmann::ordered_json& j, std::mt19937_64& rng) {
  if (j.is_object()) {
    std::vector<std::pair<std::string, nlohmann::ordered_json>> items;
    for (auto& [k, v] : j.items()) items.emplace_back(k, v);
    std::shuffle(items.begin(), items.end(), rng);
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    for (auto& [k, v] : items) {
      shuffle_json(v, rng);
      out[k] = std::move(v);
    }
    j = std::move(out);
  } else if (j.is_array()) {
    for (auto& v : j) shuffle_json(v, rng);
  }
}

using Lines = std::vector<std::string>;

inline Lines split_lines_keep(const std::string& text) {
  Lines out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    out.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return out;
}

inline std::string join(const Lines& lines) {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

inline std::size_t indent_of(const std::string& line) {
  const auto p = line.find_first_not_of(' ');
  return p == std::string::npos ? std::string::npos : p;
}

inline bool is_blank_or_comment(const std::string& line) {
  const auto p = indent_of(line);
  return p == std::string::npos || line[p] == '#';
}

inline std::string trim_right(std::string s) {
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.pop_back();
  return s;
}

// Splits `lines` into chunks that each start at a line indented exactly
// `indent`. Leading blank or comment lines stay with the chunk they precede.
inline std::vector<Lines> chunks_at(const Lines& lines, std::size_t indent,
                                    bool (*opens)(const std::string&)) {
  std::vector<Lines> out;
  Lines pending;
  for (const auto& l : lines) {
    if (!is_blank_or_comment(l) && indent_of(l) == indent && opens(l)) {
      out.push_back(pending);
      pending.clear();
      out.back().push_back(l);
      continue;
    }
    if (out.empty() || is_blank_or_comment(l)) {
      pending.push_back(l);
    } else {
      out.back().insert(out.back().end(), pending.begin(), pending.end());
      pending.clear();
      out.back().push_back(l);
    }
  }
  if (!pending.empty()) {
    if (out.empty()) {
      out.push_back(pending);
    } else {
      out.back().insert(out.back().end(), pending.begin(), pending.end());
    }
  }
  return out;
}

inline bool yaml_key_line(const std::string& l) {
  const auto p = indent_of(l);
  return l[p] != '-' && l.find(':') != std::string::npos;
}

// Body of a YAML chunk is a mapping worth shuffling only when its header
// opens a nested block that is not a block scalar or a list.
inline void shuffle_yaml(Lines& lines, std::size_t indent, std::mt19937_64& rng) {
  auto chunks = chunks_at(lines, indent, yaml_key_line);
  std::size_t key_chunks = 0;
  for (const auto& c : chunks) {
    for (const auto& l : c) {
      if (!is_blank_or_comment(l)) {
        key_chunks += indent_of(l) == indent && yaml_key_line(l);
        break;
      }
    }
  }
  if (key_chunks != chunks.size()) return;
  for (auto& c : chunks) {
    std::size_t header = 0;
    while (is_blank_or_comment(c[header])) ++header;
    const std::string h = trim_right(c[header]);
    if (h.ends_with("|") || h.ends_with(">") || h.ends_with("|-") || h.ends_with(">-")) continue;
    Lines body(c.begin() + header + 1, c.end());
    std::size_t child = std::string::npos;
    for (const auto& l : body) {
      if (!is_blank_or_comment(l)) {
        child = indent_of(l);
        break;
      }
    }
    if (child == std::string::npos || child <= indent) continue;
    bool all_deeper = true;
    for (const auto& l : body) all_deeper &= is_blank_or_comment(l) || indent_of(l) >= child;
    if (!all_deeper) continue;
    shuffle_yaml(body, child, rng);
    c.resize(header + 1);
    c.insert(c.end(), body.begin(), body.end());
  }
  std::shuffle(chunks.begin(), chunks.end(), rng);
  lines.clear();
  for (const auto& c : chunks) lines.insert(lines.end(), c.begin(), c.end());
}

inline bool hcl_opens(const std::string& l) {
  const auto p = indent_of(l);
  return std::isalpha(static_cast<unsigned char>(l[p])) != 0 || l[p] == '_';
}

inline std::string hcl_key(const Lines& chunk) {
  for (const auto& l : chunk) {
    if (is_blank_or_comment(l)) continue;
    const auto p = indent_of(l);
    auto e = p;
    while (e < l.size() && (std::isalnum(static_cast<unsigned char>(l[e])) || l[e] == '_' || l[e] == '"'))
      ++e;
    return l.substr(p, e - p);
  }
  return "";
}

// Groups heredoc bodies and multi-line values with the line that opened them
// by tracking bracket depth, then shuffles the chunks at `indent`. Repeated
// blocks of the same name keep their relative order since that order is
// meaningful.
inline void shuffle_hcl(Lines& lines, std::size_t indent, std::mt19937_64& rng) {
  std::vector<Lines> chunks;
  int depth = 0;
  std::string heredoc;
  for (const auto& l : lines) {
    const bool starts = heredoc.empty() && depth == 0 && !is_blank_or_comment(l) &&
                        indent_of(l) == indent && hcl_opens(l);
    if (starts || chunks.empty()) chunks.emplace_back();
    chunks.back().push_back(l);
    if (!heredoc.empty()) {
      if (indent_of(l) != std::string::npos && trim_right(l.substr(indent_of(l))) == heredoc) {
        heredoc.clear();
      }
      continue;
    }
    bool in_string = false;
    for (std::size_t i = 0; i < l.size(); ++i) {
      const char c = l[i];
      if (c == '"' && (i == 0 || l[i - 1] != '\\')) in_string = !in_string;
      if (in_string) continue;
      if (c == '#') break;
      if (c == '{' || c == '[' || c == '(') ++depth;
      if (c == '}' || c == ']' || c == ')') --depth;
      if (c == '<' && i + 1 < l.size() && l[i + 1] == '<') {
        std::string tag = l.substr(i + 2);
        if (!tag.empty() && tag[0] == '-') tag.erase(0, 1);
        heredoc = trim_right(tag);
        break;
      }
    }
  }
  // The closing brace of the enclosing block is its own chunk at the end.
  std::vector<Lines> tail;
  while (!chunks.empty() && hcl_key(chunks.back()).empty()) {
    tail.insert(tail.begin(), chunks.back());
    chunks.pop_back();
  }
  for (auto& c : chunks) {
    std::size_t header = 0;
    while (header < c.size() && is_blank_or_comment(c[header])) ++header;
    if (header >= c.size() || trim_right(c[header]).back() != '{' ||
        c[header].find('=') != std::string::npos) {
      continue;
    }
    std::size_t close = c.size();
    while (close > header + 1 && is_blank_or_comment(c[close - 1])) --close;
    if (close <= header + 1) continue;
    --close;
    Lines body(c.begin() + header + 1, c.begin() + close);
    Lines closing(c.begin() + close, c.end());
    shuffle_hcl(body, indent + 2, rng);
    c.resize(header + 1);
    c.insert(c.end(), body.begin(), body.end());
    c.insert(c.end(), closing.begin(), closing.end());
  }
  std::map<std::string, std::vector<Lines>> by_key;
  for (const auto& c : chunks) by_key[hcl_key(c)].push_back(c);
  std::shuffle(chunks.begin(), chunks.end(), rng);
  std::map<std::string, std::size_t> used;
  for (auto& c : chunks) {
    const std::string k = hcl_key(c);
    c = by_key[k][used[k]++];
  }
  lines.clear();
  for (const auto& c : chunks) lines.insert(lines.end(), c.begin(), c.end());
  for (const auto& c : tail) lines.insert(lines.end(), c.begin(), c.end());
}

inline std::string shuffle_template(const std::string& filename, const std::string& text,
                                    std::mt19937_64& rng) {
  if (filename.ends_with(".json")) {
    auto j = nlohmann::ordered_json::parse(text);
    shuffle_json(j, rng);
    return j.dump(2);
  }
  Lines lines = split_lines_keep(text);
  if (filename.ends_with(".tf")) {
    shuffle_hcl(lines, 0, rng);
  } else {
    shuffle_yaml(lines, 0, rng);
  }
  return join(lines);
}

// Distinct outputs over a fixed number of shuffles; 1 means nothing moved.
inline std::size_t distinct_orderings(const std::string& filename, const std::string& text) {
  std::mt19937_64 rng(1);
  std::set<std::string> seen;
  for (int i = 0; i < 20; ++i) seen.insert(shuffle_template(filename, text, rng));
  return seen.size();
}

}  // namespace permute
