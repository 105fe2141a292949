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
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace slsa {

using Bytes = std::vector<std::uint8_t>;

bool iequals(std::string_view a, std::string_view b);
std::string to_lower(std::string_view s);
bool icontains(std::string_view haystack, std::string_view needle);
std::string_view trim(std::string_view s);
std::vector<std::string> split_lines(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);
Bytes read_binary_file(const std::filesystem::path& path);
void write_binary_file(const std::filesystem::path& path,
                       std::span<const std::uint8_t> data);

inline std::string_view as_text(std::span<const std::uint8_t> bytes) {
  return {reinterpret_cast<const char*>(bytes.data()), bytes.size()};
}
inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

// Regular files under root, sorted by generic relative path.
std::vector<std::filesystem::path> list_files_sorted(
    const std::filesystem::path& root);

// Lowercase hex SHA-256.
std::string sha256_hex(std::span<const std::uint8_t> data);

std::string hex_encode(std::span<const std::uint8_t> data);
Bytes hex_decode(std::string_view hex);

}  // namespace slsa
