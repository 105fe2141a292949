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

// Container and codec internals shared by the archive front-end.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "slsa_audit/archive.hpp"

namespace slsa::archive::detail {

// Caps total decompressed output for one archive.
class OutputBudget {
 public:
  OutputBudget(std::uint64_t archive_size, const ExtractLimits& limits);

  void consume(std::uint64_t n);
  std::uint64_t remaining() const { return limit_ - used_; }
  std::uint64_t limit() const { return limit_; }

 private:
  std::uint64_t limit_;
  std::uint64_t used_ = 0;
};

enum class Codec { kGzip, kBzip2, kXz, kZstd, kLzmaAlone };

Bytes compress(Codec codec, std::span<const std::uint8_t> data);
// Throws kExtraction on corrupt input and kBomb when the budget runs out.
Bytes decompress(Codec codec, std::span<const std::uint8_t> data, OutputBudget& budget);

// Raw (headerless) deflate, as used inside zip members.
Bytes deflate_raw(std::span<const std::uint8_t> data);
Bytes inflate_raw(std::span<const std::uint8_t> data, std::uint64_t expected_size,
                  OutputBudget& budget, std::uint64_t offset);

std::uint32_t crc32_of(std::span<const std::uint8_t> data);

// Rejects absolute paths and any ".." component; strips leading "./".
std::string sanitize_member_path(std::string_view raw);

Bytes write_tar(std::span<const ArchiveEntry> sorted_entries);
ExtractResult read_tar(std::span<const std::uint8_t> data, OutputBudget& budget);

Bytes write_zip(std::span<const ArchiveEntry> sorted_entries);
ExtractResult read_zip(std::span<const std::uint8_t> data, OutputBudget& budget);

Bytes write_7z(std::span<const ArchiveEntry> sorted_entries);
ExtractResult read_7z(std::span<const std::uint8_t> data, OutputBudget& budget);

// liblzma raw coders used by 7z folders.
struct RawFilter {
  std::uint64_t id;  // liblzma filter id
  Bytes properties;  // 7z coder properties
};
Bytes lzma2_raw_encode(std::span<const std::uint8_t> data, std::uint8_t& property_byte);
Bytes raw_decode_chain(std::span<const RawFilter> chain, std::span<const std::uint8_t> packed,
                       std::uint64_t unpack_size);

}  // namespace slsa::archive::detail
