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

#include <cstring>

#include "detail.hpp"

namespace slsa::archive::detail {

namespace {

constexpr std::uint32_t kLocalSig = 0x04034b50;
constexpr std::uint32_t kCentralSig = 0x02014b50;
constexpr std::uint32_t kEndSig = 0x06054b50;
constexpr std::uint16_t kFlagEncrypted = 0x0001;
constexpr std::uint16_t kFlagUtf8 = 0x0800;
constexpr std::uint16_t kDosDate1980 = 0x21;  // 1980-01-01

void put16(Bytes& b, std::uint16_t v) {
  b.push_back(static_cast<std::uint8_t>(v));
  b.push_back(static_cast<std::uint8_t>(v >> 8));
}
void put32(Bytes& b, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint16_t get16(std::span<const std::uint8_t> d, std::size_t off) {
  return static_cast<std::uint16_t>(d[off] | (d[off + 1] << 8));
}
std::uint32_t get32(std::span<const std::uint8_t> d, std::size_t off) {
  return static_cast<std::uint32_t>(d[off]) | (static_cast<std::uint32_t>(d[off + 1]) << 8) |
         (static_cast<std::uint32_t>(d[off + 2]) << 16) |
         (static_cast<std::uint32_t>(d[off + 3]) << 24);
}

[[noreturn]] void corrupt(const std::string& what, std::size_t off) {
  throw Error(ErrorKind::kExtraction, "corrupt zip: " + what + " at offset " + std::to_string(off));
}

}  // namespace

Bytes write_zip(std::span<const ArchiveEntry> sorted_entries) {
  if (sorted_entries.size() > 0xffff) {
    throw Error(ErrorKind::kUnsupportedFormat, "zip writer supports at most 65535 members");
  }
  Bytes out;
  Bytes central;
  for (const auto& e : sorted_entries) {
    if (e.data.size() > 0xfffffffeULL || out.size() > 0xfffffffeULL) {
      throw Error(ErrorKind::kUnsupportedFormat, "zip writer does not emit zip64 archives");
    }
    const std::uint32_t crc = crc32_of(e.data);
    Bytes packed = deflate_raw(e.data);
    std::uint16_t method = 8;
    if (packed.size() >= e.data.size()) {
      packed = e.data;
      method = 0;
    }
    const auto local_off = static_cast<std::uint32_t>(out.size());
    const auto name_len = static_cast<std::uint16_t>(e.path.size());

    put32(out, kLocalSig);
    put16(out, 20);
    put16(out, kFlagUtf8);
    put16(out, method);
    put16(out, 0);
    put16(out, kDosDate1980);
    put32(out, crc);
    put32(out, static_cast<std::uint32_t>(packed.size()));
    put32(out, static_cast<std::uint32_t>(e.data.size()));
    put16(out, name_len);
    put16(out, 0);
    out.insert(out.end(), e.path.begin(), e.path.end());
    out.insert(out.end(), packed.begin(), packed.end());

    put32(central, kCentralSig);
    put16(central, 0x0314);  // made by unix, spec 2.0
    put16(central, 20);
    put16(central, kFlagUtf8);
    put16(central, method);
    put16(central, 0);
    put16(central, kDosDate1980);
    put32(central, crc);
    put32(central, static_cast<std::uint32_t>(packed.size()));
    put32(central, static_cast<std::uint32_t>(e.data.size()));
    put16(central, name_len);
    put16(central, 0);
    put16(central, 0);
    put16(central, 0);
    put16(central, 0);
    put32(central, 0100644u << 16);
    put32(central, local_off);
    central.insert(central.end(), e.path.begin(), e.path.end());
  }
  const auto cd_off = static_cast<std::uint32_t>(out.size());
  out.insert(out.end(), central.begin(), central.end());
  put32(out, kEndSig);
  put16(out, 0);
  put16(out, 0);
  put16(out, static_cast<std::uint16_t>(sorted_entries.size()));
  put16(out, static_cast<std::uint16_t>(sorted_entries.size()));
  put32(out, static_cast<std::uint32_t>(central.size()));
  put32(out, cd_off);
  put16(out, 0);
  return out;
}

ExtractResult read_zip(std::span<const std::uint8_t> data, OutputBudget& budget) {
  ExtractResult result;
  if (data.size() < 22) corrupt("archive shorter than end record", 0);

  // The end record sits within the last 64 KiB + 22 bytes.
  std::size_t eocd = std::string::npos;
  const std::size_t lowest = data.size() > 65557 ? data.size() - 65557 : 0;
  for (std::size_t i = data.size() - 22 + 1; i-- > lowest;) {
    if (get32(data, i) == kEndSig) {
      eocd = i;
      break;
    }
  }
  if (eocd == std::string::npos) corrupt("missing end of central directory", data.size());

  const std::uint16_t count = get16(data, eocd + 10);
  const std::uint32_t cd_size = get32(data, eocd + 12);
  const std::uint32_t cd_off = get32(data, eocd + 16);
  if (count == 0xffff || cd_off == 0xffffffffu || cd_size == 0xffffffffu) {
    throw Error(ErrorKind::kUnsupportedFormat, "zip64 archives are not supported");
  }
  if (static_cast<std::uint64_t>(cd_off) + cd_size > eocd) {
    corrupt("central directory out of bounds", eocd);
  }

  std::size_t p = cd_off;
  for (std::uint16_t i = 0; i < count; ++i) {
    if (p + 46 > data.size() || get32(data, p) != kCentralSig) {
      corrupt("bad central directory entry", p);
    }
    const std::uint16_t flags = get16(data, p + 8);
    const std::uint16_t method = get16(data, p + 10);
    const std::uint32_t crc = get32(data, p + 16);
    const std::uint32_t csize = get32(data, p + 20);
    const std::uint32_t usize = get32(data, p + 24);
    const std::uint16_t name_len = get16(data, p + 28);
    const std::uint16_t extra_len = get16(data, p + 30);
    const std::uint16_t comment_len = get16(data, p + 32);
    const std::uint32_t ext_attr = get32(data, p + 38);
    const std::uint32_t local_off = get32(data, p + 42);
    if (p + 46 + name_len > data.size()) corrupt("truncated member name", p);
    const std::string name(reinterpret_cast<const char*>(data.data() + p + 46), name_len);
    const std::size_t entry_at = p;
    p += 46 + static_cast<std::size_t>(name_len) + extra_len + comment_len;

    if (csize == 0xffffffffu || usize == 0xffffffffu || local_off == 0xffffffffu) {
      throw Error(ErrorKind::kUnsupportedFormat, "zip64 members are not supported");
    }
    if (!name.empty() && name.back() == '/') {
      sanitize_member_path(name);
      continue;
    }
    const std::uint32_t unix_mode = ext_attr >> 16;
    if ((unix_mode & 0170000) == 0120000) {
      result.notices.push_back("skipped symlink member: " + name);
      continue;
    }
    const std::string path = sanitize_member_path(name);
    if (flags & kFlagEncrypted) {
      result.encrypted = true;
      result.notices.push_back("encrypted member not scanned: " + path);
      continue;
    }

    if (static_cast<std::uint64_t>(local_off) + 30 > data.size() ||
        get32(data, local_off) != kLocalSig) {
      corrupt("bad local header for " + path, local_off);
    }
    const std::size_t body = static_cast<std::size_t>(local_off) + 30 +
                             get16(data, local_off + 26) + get16(data, local_off + 28);
    if (body + csize > data.size()) corrupt("truncated member data for " + path, body);
    const auto packed = data.subspan(body, csize);

    Bytes content;
    if (method == 0) {
      budget.consume(csize);
      content.assign(packed.begin(), packed.end());
    } else if (method == 8) {
      content = inflate_raw(packed, usize, budget, body);
    } else {
      result.notices.push_back("unsupported compression method " + std::to_string(method) +
                               " for member: " + path);
      continue;
    }
    if (content.size() != usize) corrupt("size mismatch for " + path, entry_at);
    if (crc32_of(content) != crc) corrupt("CRC mismatch for " + path, body);
    result.entries.push_back({path, std::move(content)});
  }
  return result;
}

}  // namespace slsa::archive::detail
