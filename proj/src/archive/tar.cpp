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
#include <cstring>

#include "detail.hpp"

namespace slsa::archive::detail {

namespace {

constexpr std::size_t kBlock = 512;

std::uint64_t parse_octal(const std::uint8_t* p, std::size_t n) {
  // GNU base-256 for large values.
  if (n > 0 && (p[0] & 0x80)) {
    std::uint64_t v = p[0] & 0x7f;
    for (std::size_t i = 1; i < n; ++i) v = (v << 8) | p[i];
    return v;
  }
  std::uint64_t v = 0;
  std::size_t i = 0;
  while (i < n && (p[i] == ' ' || p[i] == 0)) ++i;
  for (; i < n && p[i] >= '0' && p[i] <= '7'; ++i) v = v * 8 + (p[i] - '0');
  return v;
}

std::string field_string(const std::uint8_t* p, std::size_t n) {
  std::size_t len = 0;
  while (len < n && p[len] != 0) ++len;
  return std::string(reinterpret_cast<const char*>(p), len);
}

bool all_zero(const std::uint8_t* p, std::size_t n) {
  return std::all_of(p, p + n, [](std::uint8_t b) { return b == 0; });
}

bool checksum_ok(const std::uint8_t* h) {
  const std::uint64_t stored = parse_octal(h + 148, 8);
  std::uint64_t unsigned_sum = 0;
  std::int64_t signed_sum = 0;
  for (std::size_t i = 0; i < kBlock; ++i) {
    const std::uint8_t b = (i >= 148 && i < 156) ? ' ' : h[i];
    unsigned_sum += b;
    signed_sum += static_cast<std::int8_t>(b);
  }
  return stored == unsigned_sum || static_cast<std::int64_t>(stored) == signed_sum;
}

// Parses "len key=value\n" records; returns path if present.
std::optional<std::string> pax_path(std::string_view body) {
  std::optional<std::string> path;
  std::size_t pos = 0;
  while (pos < body.size()) {
    const auto sp = body.find(' ', pos);
    if (sp == std::string_view::npos) break;
    std::size_t len = 0;
    for (std::size_t i = pos; i < sp; ++i) {
      if (body[i] < '0' || body[i] > '9') return path;
      len = len * 10 + static_cast<std::size_t>(body[i] - '0');
    }
    if (len == 0 || pos + len > body.size()) break;
    std::string_view rec = body.substr(sp + 1, pos + len - sp - 1);
    if (!rec.empty() && rec.back() == '\n') rec.remove_suffix(1);
    const auto eq = rec.find('=');
    if (eq != std::string_view::npos && rec.substr(0, eq) == "path") {
      path = std::string(rec.substr(eq + 1));
    }
    pos += len;
  }
  return path;
}

void write_octal(std::uint8_t* p, std::size_t n, std::uint64_t v) {
  // n-1 digits followed by NUL.
  std::string s(n - 1, '0');
  for (std::size_t i = n - 1; i-- > 0 && v;) {
    s[i] = static_cast<char>('0' + (v & 7));
    v >>= 3;
  }
  std::memcpy(p, s.data(), n - 1);
  p[n - 1] = 0;
}

void write_header(Bytes& out, std::string_view name, std::uint64_t size, char type) {
  std::uint8_t h[kBlock] = {};
  std::memcpy(h, name.data(), std::min<std::size_t>(name.size(), 100));
  write_octal(h + 100, 8, 0644);
  write_octal(h + 108, 8, 0);
  write_octal(h + 116, 8, 0);
  if (size > 077777777777ULL) {
    h[124] = 0x80;
    for (int i = 0; i < 8; ++i) h[135 - i] = static_cast<std::uint8_t>(size >> (8 * i));
  } else {
    write_octal(h + 124, 12, size);
  }
  write_octal(h + 136, 12, 0);
  h[156] = static_cast<std::uint8_t>(type);
  std::memcpy(h + 257, "ustar", 6);
  std::memcpy(h + 263, "00", 2);
  std::memset(h + 148, ' ', 8);
  unsigned sum = 0;
  for (auto b : h) sum += b;
  write_octal(h + 148, 7, sum);
  h[155] = ' ';
  out.insert(out.end(), h, h + kBlock);
}

void write_padded(Bytes& out, std::span<const std::uint8_t> data) {
  out.insert(out.end(), data.begin(), data.end());
  const std::size_t pad = (kBlock - data.size() % kBlock) % kBlock;
  out.insert(out.end(), pad, 0);
}

}  // namespace

std::string sanitize_member_path(std::string_view raw) {
  std::string p(raw);
  std::replace(p.begin(), p.end(), '\\', '/');
  if (p.empty()) throw Error(ErrorKind::kExtraction, "empty member path");
  if (p.front() == '/' || (p.size() >= 2 && p[1] == ':')) {
    throw Error(ErrorKind::kSecurity, "absolute member path rejected: " + std::string(raw));
  }
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= p.size()) {
    auto slash = p.find('/', start);
    if (slash == std::string::npos) slash = p.size();
    const std::string part = p.substr(start, slash - start);
    if (part == "..") {
      throw Error(ErrorKind::kSecurity, "path traversal in member path: " + std::string(raw));
    }
    if (!part.empty() && part != ".") parts.push_back(part);
    start = slash + 1;
  }
  if (parts.empty()) throw Error(ErrorKind::kExtraction, "empty member path: " + std::string(raw));
  std::string out;
  for (const auto& part : parts) {
    if (!out.empty()) out += '/';
    out += part;
  }
  return out;
}

Bytes write_tar(std::span<const ArchiveEntry> sorted_entries) {
  Bytes out;
  for (const auto& e : sorted_entries) {
    if (e.path.size() > 100) {
      std::string long_name = e.path;
      long_name.push_back('\0');
      write_header(out, "././@LongLink", long_name.size(), 'L');
      write_padded(out, to_bytes(long_name));
    }
    write_header(out, e.path, e.data.size(), '0');
    write_padded(out, e.data);
  }
  out.insert(out.end(), 2 * kBlock, 0);
  return out;
}

ExtractResult read_tar(std::span<const std::uint8_t> data, OutputBudget& budget) {
  ExtractResult result;
  std::size_t off = 0;
  std::optional<std::string> pending_name;
  bool saw_end = false;
  while (off + kBlock <= data.size()) {
    const std::uint8_t* h = data.data() + off;
    if (all_zero(h, kBlock)) {
      saw_end = true;
      break;
    }
    if (!checksum_ok(h)) {
      throw Error(ErrorKind::kExtraction,
                  "corrupt tar header checksum at offset " + std::to_string(off));
    }
    const std::uint64_t size = parse_octal(h + 124, 12);
    const char type = static_cast<char>(h[156]);
    const std::size_t body = off + kBlock;
    if (size > data.size() - body) {
      throw Error(ErrorKind::kExtraction,
                  "truncated tar member at offset " + std::to_string(off));
    }
    const auto payload = data.subspan(body, static_cast<std::size_t>(size));
    const std::size_t next = body + static_cast<std::size_t>((size + kBlock - 1) / kBlock * kBlock);

    std::string name = field_string(h, 100);
    if (std::memcmp(h + 257, "ustar", 5) == 0) {
      const std::string prefix = field_string(h + 345, 155);
      if (!prefix.empty()) name = prefix + "/" + name;
    }
    if (pending_name) {
      name = *pending_name;
      pending_name.reset();
    }

    switch (type) {
      case 'L':
        pending_name = field_string(payload.data(), payload.size());
        break;
      case 'x':
        pending_name = pax_path(as_text(payload));
        break;
      case 'g':
        break;
      case '0':
      case '\0':
      case '7': {
        const std::string path = sanitize_member_path(name);
        budget.consume(size);
        result.entries.push_back({path, Bytes(payload.begin(), payload.end())});
        break;
      }
      case '5':
        sanitize_member_path(name);
        break;
      case '1':
      case '2':
        result.notices.push_back("skipped link member: " + name);
        break;
      default:
        result.notices.push_back("skipped special member (type '" + std::string(1, type) +
                                 "'): " + name);
        break;
    }
    off = next;
  }
  if (!saw_end && off != data.size()) {
    throw Error(ErrorKind::kExtraction, "truncated tar header at offset " + std::to_string(off));
  }
  if (!saw_end) result.notices.push_back("tar archive lacks end-of-archive marker");
  return result;
}

}  // namespace slsa::archive::detail
