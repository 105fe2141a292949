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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace slsa {

// A package version. Strict semantic versions (optionally `v`-prefixed) use
// SemVer 2.0 precedence; anything else that still looks like a version is
// compared segment-wise on [.-+_~:] separators.
class Version {
 public:
  static std::optional<Version> parse(std::string_view text);

  const std::string& text() const { return text_; }
  bool is_semver() const { return semver_; }

  // Negative, zero or positive. Falls back to segment comparison unless both
  // sides are strict semver.
  friend int compare(const Version& a, const Version& b);

  friend bool operator<(const Version& a, const Version& b) { return compare(a, b) < 0; }
  friend bool operator==(const Version& a, const Version& b) { return compare(a, b) == 0; }

 private:
  std::string text_;
  bool semver_ = false;
  unsigned long long major_ = 0, minor_ = 0, patch_ = 0;
  std::vector<std::string> prerelease_;
  std::vector<std::string> segments_;
};

}  // namespace slsa
