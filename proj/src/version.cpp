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

#include "slsa_audit/version.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace slsa {

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c)) != 0;
  });
}

std::optional<unsigned long long> to_number(std::string_view s) {
  if (!all_digits(s) || s.size() > 18) return std::nullopt;
  unsigned long long v = 0;
  std::from_chars(s.data(), s.data() + s.size(), v);
  return v;
}

std::vector<std::string> split_on(std::string_view s, std::string_view seps) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (seps.find(c) != std::string_view::npos) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

int compare_identifiers(std::string_view a, std::string_view b) {
  const bool na = all_digits(a);
  const bool nb = all_digits(b);
  if (na && nb) {
    // Compare numerically without overflow: strip leading zeros, then length.
    while (a.size() > 1 && a.front() == '0') a.remove_prefix(1);
    while (b.size() > 1 && b.front() == '0') b.remove_prefix(1);
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    return a.compare(b) < 0 ? -1 : (a.compare(b) > 0 ? 1 : 0);
  }
  if (na != nb) return na ? -1 : 1;  // numeric identifiers sort first
  const int c = a.compare(b);
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

}  // namespace

std::optional<Version> Version::parse(std::string_view text) {
  if (text.empty()) return std::nullopt;
  const bool charset_ok = std::all_of(text.begin(), text.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' ||
           c == '+' || c == '_' || c == '~' || c == ':';
  });
  const bool has_digit = std::any_of(text.begin(), text.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c)) != 0;
  });
  if (!charset_ok || !has_digit) return std::nullopt;

  Version v;
  v.text_ = std::string(text);

  std::string_view core = text;
  if (!core.empty() && (core.front() == 'v' || core.front() == 'V')) {
    core.remove_prefix(1);
  }
  v.segments_ = split_on(core, ".-+_~:");

  // Strict semver: MAJOR.MINOR.PATCH[-pre][+build]
  std::string_view rest = core;
  std::string_view build;
  if (auto plus = rest.find('+'); plus != std::string_view::npos) {
    build = rest.substr(plus + 1);
    rest = rest.substr(0, plus);
  }
  std::string_view pre;
  bool has_pre = false;
  if (auto dash = rest.find('-'); dash != std::string_view::npos) {
    pre = rest.substr(dash + 1);
    rest = rest.substr(0, dash);
    has_pre = true;
  }
  const auto nums = split_on(rest, ".");
  bool semver = nums.size() == 3;
  unsigned long long parts[3] = {0, 0, 0};
  for (std::size_t i = 0; semver && i < 3; ++i) {
    auto n = to_number(nums[i]);
    if (!n) semver = false;
    else parts[i] = *n;
  }
  if (semver && has_pre) {
    for (const auto& id : split_on(pre, ".")) {
      if (id.empty() || id.find_first_of("_~:") != std::string::npos) semver = false;
    }
  }
  if (semver && build.find_first_of("_~:+") != std::string_view::npos) semver = false;
  if (semver) {
    v.semver_ = true;
    v.major_ = parts[0];
    v.minor_ = parts[1];
    v.patch_ = parts[2];
    if (has_pre) v.prerelease_ = split_on(pre, ".");
  }
  return v;
}

int compare(const Version& a, const Version& b) {
  if (a.semver_ && b.semver_) {
    for (auto [x, y] : {std::pair{a.major_, b.major_}, std::pair{a.minor_, b.minor_},
                        std::pair{a.patch_, b.patch_}}) {
      if (x != y) return x < y ? -1 : 1;
    }
    if (a.prerelease_.empty() != b.prerelease_.empty()) {
      return a.prerelease_.empty() ? 1 : -1;
    }
    const std::size_t n = std::min(a.prerelease_.size(), b.prerelease_.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (int c = compare_identifiers(a.prerelease_[i], b.prerelease_[i])) return c;
    }
    if (a.prerelease_.size() != b.prerelease_.size()) {
      return a.prerelease_.size() < b.prerelease_.size() ? -1 : 1;
    }
    return 0;
  }
  const std::size_t n = std::max(a.segments_.size(), b.segments_.size());
  for (std::size_t i = 0; i < n; ++i) {
    const std::string_view x = i < a.segments_.size() ? a.segments_[i] : "0";
    const std::string_view y = i < b.segments_.size() ? b.segments_[i] : "0";
    if (int c = compare_identifiers(x, y)) return c;
  }
  return 0;
}

}  // namespace slsa
