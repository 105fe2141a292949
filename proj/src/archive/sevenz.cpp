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

#include <lzma.h>

#include <algorithm>
#include <cstring>
#include <optional>

#include "detail.hpp"

namespace slsa::archive::detail {

namespace {

constexpr std::uint8_t kSignature[6] = {'7', 'z', 0xBC, 0xAF, 0x27, 0x1C};
constexpr std::size_t kStartHeaderSize = 32;

enum Prop : std::uint8_t {
  kEnd = 0x00,
  kHeader = 0x01,
  kArchiveProperties = 0x02,
  kAdditionalStreamsInfo = 0x03,
  kMainStreamsInfo = 0x04,
  kFilesInfo = 0x05,
  kPackInfo = 0x06,
  kUnPackInfo = 0x07,
  kSubStreamsInfo = 0x08,
  kSize = 0x09,
  kCRC = 0x0A,
  kFolder = 0x0B,
  kCodersUnPackSize = 0x0C,
  kNumUnPackStream = 0x0D,
  kEmptyStream = 0x0E,
  kEmptyFile = 0x0F,
  kAnti = 0x10,
  kName = 0x11,
  kWinAttributes = 0x15,
  kEncodedHeader = 0x17,
};

constexpr std::uint32_t kAttrDirectory = 0x10;
constexpr std::uint32_t kAttrUnixExtension = 0x8000;

// ---------------------------------------------------------------------------
// UTF-16LE <-> UTF-8

std::string utf16le_to_utf8(std::span<const std::uint8_t> d) {
  std::string out;
  for (std::size_t i = 0; i + 1 < d.size(); i += 2) {
    std::uint32_t cp = d[i] | (d[i + 1] << 8);
    if (cp >= 0xD800 && cp <= 0xDBFF && i + 3 < d.size()) {
      const std::uint32_t lo = d[i + 2] | (d[i + 3] << 8);
      if (lo >= 0xDC00 && lo <= 0xDFFF) {
        cp = 0x10000 + ((cp - 0xD800) << 10) + (lo - 0xDC00);
        i += 2;
      }
    }
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }
  return out;
}

void append_utf16le(Bytes& out, std::string_view s) {
  auto put = [&](std::uint32_t u) {
    out.push_back(static_cast<std::uint8_t>(u));
    out.push_back(static_cast<std::uint8_t>(u >> 8));
  };
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<std::uint8_t>(s[i]);
    std::uint32_t cp = c;
    std::size_t len = 1;
    if (c >= 0xF0 && i + 3 < s.size()) {
      cp = ((c & 0x07) << 18) | ((s[i + 1] & 0x3F) << 12) | ((s[i + 2] & 0x3F) << 6) |
           (s[i + 3] & 0x3F);
      len = 4;
    } else if (c >= 0xE0 && i + 2 < s.size()) {
      cp = ((c & 0x0F) << 12) | ((s[i + 1] & 0x3F) << 6) | (s[i + 2] & 0x3F);
      len = 3;
    } else if (c >= 0xC0 && i + 1 < s.size()) {
      cp = ((c & 0x1F) << 6) | (s[i + 1] & 0x3F);
      len = 2;
    }
    if (cp >= 0x10000) {
      cp -= 0x10000;
      put(0xD800 + (cp >> 10));
      put(0xDC00 + (cp & 0x3FF));
    } else {
      put(cp);
    }
    i += len;
  }
  put(0);
}

// ---------------------------------------------------------------------------
// Header primitives

void write_number(Bytes& out, std::uint64_t v) {
  for (int n = 0; n <= 8; ++n) {
    if (n == 8 || v < (std::uint64_t{1} << (7 * (n + 1)))) {
      const auto ones = static_cast<std::uint8_t>(0xFF00 >> n);
      const std::uint8_t high = n == 8 ? 0 : static_cast<std::uint8_t>(v >> (8 * n));
      out.push_back(static_cast<std::uint8_t>(ones | high));
      for (int i = 0; i < n; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
      return;
    }
  }
}

void write_u32(Bytes& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}
void write_u64(std::uint8_t* p, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

void write_bits(Bytes& out, const std::vector<bool>& bits) {
  std::uint8_t b = 0, mask = 0x80;
  for (bool bit : bits) {
    if (bit) b |= mask;
    mask >>= 1;
    if (mask == 0) {
      out.push_back(b);
      b = 0;
      mask = 0x80;
    }
  }
  if (mask != 0x80) out.push_back(b);
}

class Reader {
 public:
  Reader(std::span<const std::uint8_t> d, std::size_t base) : d_(d), base_(base) {}

  std::uint8_t byte() {
    need(1);
    return d_[pos_++];
  }
  std::uint64_t number() {
    const std::uint8_t first = byte();
    std::uint8_t mask = 0x80;
    std::uint64_t value = 0;
    for (int i = 0; i < 8; ++i) {
      if ((first & mask) == 0) {
        const std::uint64_t high = first & (mask - 1u);
        return value + (high << (8 * i));
      }
      value |= static_cast<std::uint64_t>(byte()) << (8 * i);
      mask >>= 1;
    }
    return value;
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(d_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::span<const std::uint8_t> take(std::uint64_t n) {
    need(n);
    auto s = d_.subspan(pos_, static_cast<std::size_t>(n));
    pos_ += static_cast<std::size_t>(n);
    return s;
  }
  std::vector<bool> bits(std::uint64_t n) {
    guard_count((n + 7) / 8);
    std::vector<bool> v(static_cast<std::size_t>(n));
    std::uint8_t b = 0, mask = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (mask == 0) {
        b = byte();
        mask = 0x80;
      }
      v[i] = (b & mask) != 0;
      mask >>= 1;
    }
    return v;
  }
  void expect(std::uint8_t id) {
    const auto at = offset();
    if (byte() != id) fail("unexpected property id", at);
  }
  // Rejects counts that cannot possibly fit in the remaining header bytes.
  void guard_count(std::uint64_t min_bytes) {
    if (min_bytes > d_.size() - pos_) fail("implausible count", offset());
  }
  std::size_t offset() const { return base_ + pos_; }

  [[noreturn]] static void fail(const std::string& what, std::size_t at) {
    throw Error(ErrorKind::kExtraction,
                "corrupt 7z header: " + what + " at offset " + std::to_string(at));
  }

 private:
  void need(std::uint64_t n) {
    if (n > d_.size() - pos_) fail("truncated", offset());
  }

  std::span<const std::uint8_t> d_;
  std::size_t base_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Streams info

struct Coder {
  Bytes id;
  std::uint64_t num_in = 1;
  std::uint64_t num_out = 1;
  Bytes props;
};

struct BindPair {
  std::uint64_t in_index;
  std::uint64_t out_index;
};

struct Folder {
  std::vector<Coder> coders;
  std::vector<BindPair> binds;
  std::vector<std::uint64_t> packed_streams;
  std::vector<std::uint64_t> unpack_sizes;
  std::optional<std::uint32_t> crc;
  std::uint64_t num_substreams = 1;

  std::uint64_t total_out() const {
    std::uint64_t n = 0;
    for (const auto& c : coders) n += c.num_out;
    return n;
  }
  std::uint64_t total_in() const {
    std::uint64_t n = 0;
    for (const auto& c : coders) n += c.num_in;
    return n;
  }
  std::uint64_t unpack_size() const {
    for (std::uint64_t i = unpack_sizes.size(); i-- > 0;) {
      const bool bound = std::any_of(binds.begin(), binds.end(),
                                     [&](const BindPair& b) { return b.out_index == i; });
      if (!bound) return unpack_sizes[i];
    }
    return 0;
  }
};

struct StreamsInfo {
  std::uint64_t pack_pos = 0;
  std::vector<std::uint64_t> pack_sizes;
  std::vector<Folder> folders;
  std::vector<std::uint64_t> sub_sizes;
  std::vector<std::optional<std::uint32_t>> sub_crcs;
  bool have_substreams = false;
};

std::vector<std::optional<std::uint32_t>> read_digests(Reader& r, std::uint64_t n) {
  r.guard_count(n / 8);
  const std::uint8_t all = r.byte();
  std::vector<bool> defined = all ? std::vector<bool>(static_cast<std::size_t>(n), true) : r.bits(n);
  std::vector<std::optional<std::uint32_t>> out(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (defined[i]) out[i] = r.u32();
  }
  return out;
}

void read_pack_info(Reader& r, StreamsInfo& si) {
  si.pack_pos = r.number();
  const std::uint64_t n = r.number();
  r.guard_count(n);
  std::uint8_t type = r.byte();
  if (type == kSize) {
    for (std::uint64_t i = 0; i < n; ++i) si.pack_sizes.push_back(r.number());
    type = r.byte();
  }
  if (type == kCRC) {
    read_digests(r, n);
    type = r.byte();
  }
  if (type != kEnd) Reader::fail("unexpected property in pack info", r.offset());
  if (si.pack_sizes.size() != n) Reader::fail("missing pack sizes", r.offset());
}

Folder read_folder(Reader& r) {
  Folder f;
  const std::uint64_t num_coders = r.number();
  if (num_coders == 0 || num_coders > 64) Reader::fail("bad coder count", r.offset());
  for (std::uint64_t i = 0; i < num_coders; ++i) {
    const std::uint8_t flags = r.byte();
    if (flags & 0x80) Reader::fail("alternative coder methods", r.offset());
    Coder c;
    auto id = r.take(flags & 0x0F);
    c.id.assign(id.begin(), id.end());
    if (flags & 0x10) {
      c.num_in = r.number();
      c.num_out = r.number();
      if (c.num_in > 64 || c.num_out > 64) Reader::fail("bad coder stream count", r.offset());
    }
    if (flags & 0x20) {
      auto props = r.take(r.number());
      c.props.assign(props.begin(), props.end());
    }
    f.coders.push_back(std::move(c));
  }
  const std::uint64_t total_out = f.total_out();
  const std::uint64_t total_in = f.total_in();
  if (total_out == 0 || total_in + 1 < total_out) Reader::fail("bad folder layout", r.offset());
  const std::uint64_t num_binds = total_out - 1;
  for (std::uint64_t i = 0; i < num_binds; ++i) {
    const std::uint64_t in_index = r.number();
    const std::uint64_t out_index = r.number();
    f.binds.push_back({in_index, out_index});
  }
  const std::uint64_t num_packed = total_in - num_binds;
  if (num_packed == 1) {
    std::vector<bool> in_bound(static_cast<std::size_t>(total_in), false);
    for (const auto& b : f.binds) {
      if (b.in_index < total_in) in_bound[static_cast<std::size_t>(b.in_index)] = true;
    }
    const auto it = std::find(in_bound.begin(), in_bound.end(), false);
    if (it == in_bound.end()) Reader::fail("folder without packed stream", r.offset());
    f.packed_streams.push_back(static_cast<std::uint64_t>(it - in_bound.begin()));
  } else {
    for (std::uint64_t i = 0; i < num_packed; ++i) f.packed_streams.push_back(r.number());
  }
  return f;
}

void read_unpack_info(Reader& r, StreamsInfo& si) {
  r.expect(kFolder);
  const std::uint64_t n = r.number();
  r.guard_count(n);
  if (r.byte() != 0) Reader::fail("external folders", r.offset());
  for (std::uint64_t i = 0; i < n; ++i) si.folders.push_back(read_folder(r));
  r.expect(kCodersUnPackSize);
  for (auto& f : si.folders) {
    for (std::uint64_t i = 0; i < f.total_out(); ++i) f.unpack_sizes.push_back(r.number());
  }
  std::uint8_t type = r.byte();
  if (type == kCRC) {
    auto crcs = read_digests(r, n);
    for (std::size_t i = 0; i < si.folders.size(); ++i) si.folders[i].crc = crcs[i];
    type = r.byte();
  }
  if (type != kEnd) Reader::fail("unexpected property in coders info", r.offset());
}

void read_substreams_info(Reader& r, StreamsInfo& si) {
  si.have_substreams = true;
  std::uint8_t type = r.byte();
  if (type == kNumUnPackStream) {
    for (auto& f : si.folders) {
      f.num_substreams = r.number();
      r.guard_count(f.num_substreams / 64);
    }
    type = r.byte();
  }
  for (const auto& f : si.folders) {
    if (f.num_substreams == 0) continue;
    std::uint64_t sum = 0;
    if (type == kSize) {
      for (std::uint64_t j = 0; j + 1 < f.num_substreams; ++j) {
        const std::uint64_t s = r.number();
        si.sub_sizes.push_back(s);
        sum += s;
      }
    } else if (f.num_substreams > 1) {
      Reader::fail("missing substream sizes", r.offset());
    }
    if (sum > f.unpack_size()) Reader::fail("substream sizes exceed folder", r.offset());
    si.sub_sizes.push_back(f.unpack_size() - sum);
  }
  if (type == kSize) type = r.byte();

  std::uint64_t digest_count = 0;
  for (const auto& f : si.folders) {
    if (!(f.num_substreams == 1 && f.crc)) digest_count += f.num_substreams;
  }
  std::vector<std::optional<std::uint32_t>> digests(static_cast<std::size_t>(digest_count));
  while (type != kEnd) {
    if (type != kCRC) Reader::fail("unexpected property in substreams info", r.offset());
    digests = read_digests(r, digest_count);
    type = r.byte();
  }
  std::size_t next = 0;
  for (const auto& f : si.folders) {
    if (f.num_substreams == 1 && f.crc) {
      si.sub_crcs.push_back(f.crc);
    } else {
      for (std::uint64_t j = 0; j < f.num_substreams; ++j) si.sub_crcs.push_back(digests[next++]);
    }
  }
}

StreamsInfo read_streams_info(Reader& r) {
  StreamsInfo si;
  std::uint8_t type = r.byte();
  if (type == kPackInfo) {
    read_pack_info(r, si);
    type = r.byte();
  }
  if (type == kUnPackInfo) {
    read_unpack_info(r, si);
    type = r.byte();
  }
  if (type == kSubStreamsInfo) {
    read_substreams_info(r, si);
    type = r.byte();
  }
  if (type != kEnd) Reader::fail("unexpected property in streams info", r.offset());
  if (!si.have_substreams) {
    for (const auto& f : si.folders) {
      si.sub_sizes.push_back(f.unpack_size());
      si.sub_crcs.push_back(f.crc);
    }
  }
  return si;
}

// ---------------------------------------------------------------------------
// Folder decoding

const Bytes kIdCopy = {0x00};
const Bytes kIdDelta = {0x03};
const Bytes kIdLzma = {0x03, 0x01, 0x01};
const Bytes kIdLzma2 = {0x21};
const Bytes kIdDeflate = {0x04, 0x01, 0x08};
const Bytes kIdBzip2 = {0x04, 0x02, 0x02};
const Bytes kIdZstd = {0x04, 0xF7, 0x11, 0x01};
const Bytes kIdAes = {0x06, 0xF1, 0x07, 0x01};

std::optional<std::uint64_t> liblzma_filter(const Bytes& id) {
  if (id == kIdDelta) return LZMA_FILTER_DELTA;
  if (id == kIdLzma) return LZMA_FILTER_LZMA1;
  if (id == kIdLzma2) return LZMA_FILTER_LZMA2;
  if (id == Bytes{0x03, 0x03, 0x01, 0x03}) return LZMA_FILTER_X86;
  if (id == Bytes{0x03, 0x03, 0x02, 0x05}) return LZMA_FILTER_POWERPC;
  if (id == Bytes{0x03, 0x03, 0x04, 0x01}) return LZMA_FILTER_IA64;
  if (id == Bytes{0x03, 0x03, 0x05, 0x01}) return LZMA_FILTER_ARM;
  if (id == Bytes{0x03, 0x03, 0x07, 0x01}) return LZMA_FILTER_ARMTHUMB;
  if (id == Bytes{0x03, 0x03, 0x08, 0x05}) return LZMA_FILTER_SPARC;
  return std::nullopt;
}

struct EncryptedFolder {};

std::string hex_id(const Bytes& id) { return id.empty() ? "(empty)" : hex_encode(id); }

Bytes decode_folder(std::span<const std::uint8_t> archive, const StreamsInfo& si,
                    std::size_t folder_index, OutputBudget& budget) {
  const Folder& f = si.folders[folder_index];
  for (const auto& c : f.coders) {
    if (c.id == kIdAes) throw EncryptedFolder{};
  }
  std::size_t first_pack = 0;
  for (std::size_t i = 0; i < folder_index; ++i) first_pack += si.folders[i].packed_streams.size();
  if (f.packed_streams.size() != 1 || first_pack >= si.pack_sizes.size()) {
    throw Error(ErrorKind::kUnsupportedFormat, "7z folder with multiple packed streams");
  }
  std::uint64_t start = kStartHeaderSize + si.pack_pos;
  for (std::size_t i = 0; i < first_pack; ++i) start += si.pack_sizes[i];
  const std::uint64_t size = si.pack_sizes[first_pack];
  if (start > archive.size() || size > archive.size() - start) {
    throw Error(ErrorKind::kExtraction,
                "truncated 7z archive: packed stream at offset " + std::to_string(start));
  }
  const auto packed = archive.subspan(static_cast<std::size_t>(start), static_cast<std::size_t>(size));

  // Linear chain from the outermost coder inwards.
  std::vector<const Coder*> chain;
  for (const auto& c : f.coders) {
    if (c.num_in != 1 || c.num_out != 1) {
      throw Error(ErrorKind::kUnsupportedFormat,
                  "unsupported 7z coder " + hex_id(c.id) + " (multi-stream)");
    }
  }
  std::uint64_t current = f.unpack_sizes.size();
  for (std::uint64_t i = f.unpack_sizes.size(); i-- > 0;) {
    const bool bound = std::any_of(f.binds.begin(), f.binds.end(),
                                   [&](const BindPair& b) { return b.out_index == i; });
    if (!bound) current = i;
  }
  while (current < f.coders.size() && chain.size() <= f.coders.size()) {
    chain.push_back(&f.coders[current]);
    auto it = std::find_if(f.binds.begin(), f.binds.end(),
                           [&](const BindPair& b) { return b.in_index == current; });
    if (it == f.binds.end()) break;
    current = it->out_index;
  }
  if (chain.size() != f.coders.size()) {
    throw Error(ErrorKind::kExtraction, "corrupt 7z folder: broken coder chain");
  }

  const std::uint64_t unpack = f.unpack_size();
  if (chain.size() == 1 &&
      (chain[0]->id == kIdDeflate || chain[0]->id == kIdBzip2 || chain[0]->id == kIdZstd)) {
    Bytes out = chain[0]->id == kIdDeflate ? inflate_raw(packed, unpack, budget, start)
                : chain[0]->id == kIdBzip2 ? decompress(Codec::kBzip2, packed, budget)
                                           : decompress(Codec::kZstd, packed, budget);
    if (out.size() != unpack) {
      throw Error(ErrorKind::kExtraction, "7z folder size mismatch at offset " + std::to_string(start));
    }
    return out;
  }

  std::vector<RawFilter> filters;
  for (const Coder* c : chain) {
    if (c->id == kIdCopy) continue;
    const auto id = liblzma_filter(c->id);
    if (!id) {
      throw Error(ErrorKind::kUnsupportedFormat, "unsupported 7z coder " + hex_id(c->id));
    }
    filters.push_back({*id, c->props});
  }
  budget.consume(unpack);
  return raw_decode_chain(filters, packed, unpack);
}

struct Parsed {
  StreamsInfo main;
  std::uint64_t num_files = 0;
  std::vector<bool> empty_stream;
  std::vector<bool> empty_file;
  std::vector<bool> anti;
  std::vector<std::string> names;
  std::vector<std::optional<std::uint32_t>> attributes;
};

void read_files_info(Reader& r, Parsed& p) {
  p.num_files = r.number();
  r.guard_count(p.num_files / 8);
  p.empty_stream.assign(static_cast<std::size_t>(p.num_files), false);
  p.attributes.assign(static_cast<std::size_t>(p.num_files), std::nullopt);
  std::uint64_t num_empty = 0;
  while (true) {
    const std::uint64_t type = r.number();
    if (type == kEnd) break;
    const std::uint64_t size = r.number();
    const auto body_at = r.offset();
    Reader sub(r.take(size), body_at);
    switch (type) {
      case kEmptyStream:
        p.empty_stream = sub.bits(p.num_files);
        num_empty = static_cast<std::uint64_t>(
            std::count(p.empty_stream.begin(), p.empty_stream.end(), true));
        break;
      case kEmptyFile:
        p.empty_file = sub.bits(num_empty);
        break;
      case kAnti:
        p.anti = sub.bits(num_empty);
        break;
      case kName: {
        if (sub.byte() != 0) Reader::fail("external names", body_at);
        auto rest = sub.take(size - 1);
        std::size_t begin = 0;
        for (std::size_t i = 0; i + 1 < rest.size(); i += 2) {
          if (rest[i] == 0 && rest[i + 1] == 0) {
            p.names.push_back(utf16le_to_utf8(rest.subspan(begin, i - begin)));
            begin = i + 2;
          }
        }
        break;
      }
      case kWinAttributes: {
        const std::uint8_t all = sub.byte();
        auto defined = all ? std::vector<bool>(static_cast<std::size_t>(p.num_files), true)
                           : sub.bits(p.num_files);
        if (sub.byte() != 0) Reader::fail("external attributes", body_at);
        for (std::size_t i = 0; i < defined.size(); ++i) {
          if (defined[i]) p.attributes[i] = sub.u32();
        }
        break;
      }
      default:
        break;  // timestamps, padding and other metadata
    }
  }
  if (p.names.size() != p.num_files) Reader::fail("file name count mismatch", r.offset());
  p.empty_file.resize(static_cast<std::size_t>(num_empty), false);
  p.anti.resize(static_cast<std::size_t>(num_empty), false);
}

void read_header(Reader& r, Parsed& p) {
  std::uint8_t type = r.byte();
  if (type == kArchiveProperties) {
    while (true) {
      const std::uint64_t t = r.number();
      if (t == kEnd) break;
      r.take(r.number());
    }
    type = r.byte();
  }
  if (type == kAdditionalStreamsInfo) {
    read_streams_info(r);
    type = r.byte();
  }
  if (type == kMainStreamsInfo) {
    p.main = read_streams_info(r);
    type = r.byte();
  }
  if (type == kFilesInfo) {
    read_files_info(r, p);
    type = r.byte();
  }
  if (type != kEnd) Reader::fail("unexpected property in header", r.offset());
}

std::uint64_t read_u64(std::span<const std::uint8_t> d, std::size_t off) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(d[off + i]) << (8 * i);
  return v;
}
std::uint32_t read_u32(std::span<const std::uint8_t> d, std::size_t off) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(d[off + i]) << (8 * i);
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------

Bytes write_7z(std::span<const ArchiveEntry> sorted_entries) {
  Bytes solid;
  std::vector<const ArchiveEntry*> streams;
  std::vector<bool> empty_stream;
  for (const auto& e : sorted_entries) {
    empty_stream.push_back(e.data.empty());
    if (!e.data.empty()) {
      streams.push_back(&e);
      solid.insert(solid.end(), e.data.begin(), e.data.end());
    }
  }

  Bytes packed;
  Bytes header;
  header.push_back(kHeader);
  if (!streams.empty()) {
    std::uint8_t prop = 0;
    packed = lzma2_raw_encode(solid, prop);
    header.push_back(kMainStreamsInfo);

    header.push_back(kPackInfo);
    write_number(header, 0);
    write_number(header, 1);
    header.push_back(kSize);
    write_number(header, packed.size());
    header.push_back(kEnd);

    header.push_back(kUnPackInfo);
    header.push_back(kFolder);
    write_number(header, 1);
    header.push_back(0);
    write_number(header, 1);          // one coder
    header.push_back(0x20 | 0x01);    // has properties, 1-byte id
    header.push_back(kIdLzma2[0]);
    write_number(header, 1);
    header.push_back(prop);
    header.push_back(kCodersUnPackSize);
    write_number(header, solid.size());
    header.push_back(kEnd);

    header.push_back(kSubStreamsInfo);
    header.push_back(kNumUnPackStream);
    write_number(header, streams.size());
    if (streams.size() > 1) {
      header.push_back(kSize);
      for (std::size_t i = 0; i + 1 < streams.size(); ++i) write_number(header, streams[i]->data.size());
    }
    header.push_back(kCRC);
    header.push_back(1);
    for (const auto* e : streams) write_u32(header, crc32_of(e->data));
    header.push_back(kEnd);

    header.push_back(kEnd);
  }
  if (!sorted_entries.empty()) {
    header.push_back(kFilesInfo);
    write_number(header, sorted_entries.size());
    const auto num_empty = static_cast<std::size_t>(
        std::count(empty_stream.begin(), empty_stream.end(), true));
    if (num_empty > 0) {
      Bytes bits;
      write_bits(bits, empty_stream);
      header.push_back(kEmptyStream);
      write_number(header, bits.size());
      header.insert(header.end(), bits.begin(), bits.end());
      Bytes file_bits;
      write_bits(file_bits, std::vector<bool>(num_empty, true));
      header.push_back(kEmptyFile);
      write_number(header, file_bits.size());
      header.insert(header.end(), file_bits.begin(), file_bits.end());
    }
    Bytes names;
    names.push_back(0);
    for (const auto& e : sorted_entries) append_utf16le(names, e.path);
    header.push_back(kName);
    write_number(header, names.size());
    header.insert(header.end(), names.begin(), names.end());
    header.push_back(kEnd);
  }
  header.push_back(kEnd);

  Bytes out(kStartHeaderSize, 0);
  std::memcpy(out.data(), kSignature, 6);
  out[6] = 0;
  out[7] = 4;
  write_u64(out.data() + 12, packed.size());
  write_u64(out.data() + 20, header.size());
  const std::uint32_t header_crc = crc32_of(header);
  for (int i = 0; i < 4; ++i) out[28 + i] = static_cast<std::uint8_t>(header_crc >> (8 * i));
  const std::uint32_t start_crc = crc32_of(std::span<const std::uint8_t>(out).subspan(12, 20));
  for (int i = 0; i < 4; ++i) out[8 + i] = static_cast<std::uint8_t>(start_crc >> (8 * i));
  out.insert(out.end(), packed.begin(), packed.end());
  out.insert(out.end(), header.begin(), header.end());
  return out;
}

ExtractResult read_7z(std::span<const std::uint8_t> data, OutputBudget& budget) {
  ExtractResult result;
  if (data.size() < kStartHeaderSize || std::memcmp(data.data(), kSignature, 6) != 0) {
    throw Error(ErrorKind::kExtraction, "corrupt 7z: bad signature header at offset 0");
  }
  if (crc32_of(data.subspan(12, 20)) != read_u32(data, 8)) {
    throw Error(ErrorKind::kExtraction, "corrupt 7z: start header CRC mismatch at offset 8");
  }
  const std::uint64_t next_off = read_u64(data, 12);
  const std::uint64_t next_size = read_u64(data, 20);
  const std::uint32_t next_crc = read_u32(data, 28);
  if (next_size == 0) return result;
  const std::uint64_t header_at = kStartHeaderSize + next_off;
  if (next_off > data.size() || header_at > data.size() || next_size > data.size() - header_at) {
    throw Error(ErrorKind::kExtraction,
                "truncated 7z archive: header expected at offset " + std::to_string(header_at));
  }
  auto header = data.subspan(static_cast<std::size_t>(header_at), static_cast<std::size_t>(next_size));
  if (crc32_of(header) != next_crc) {
    throw Error(ErrorKind::kExtraction,
                "corrupt 7z: header CRC mismatch at offset " + std::to_string(header_at));
  }

  Parsed parsed;
  try {
    Bytes decoded;
    std::size_t base = static_cast<std::size_t>(header_at);
    for (int round = 0; round < 4; ++round) {
      Reader r(header, base);
      const std::uint8_t id = r.byte();
      if (id == kHeader) {
        read_header(r, parsed);
        break;
      }
      if (id != kEncodedHeader || round == 3) Reader::fail("unknown header type", base);
      const StreamsInfo si = read_streams_info(r);
      if (si.folders.empty()) Reader::fail("encoded header without folder", base);
      decoded = decode_folder(data, si, 0, budget);
      if (si.folders[0].crc && crc32_of(decoded) != *si.folders[0].crc) {
        Reader::fail("encoded header CRC mismatch", base);
      }
      header = decoded;
      base = 0;
    }
  } catch (const EncryptedFolder&) {
    result.encrypted = true;
    result.notices.push_back("7z header is encrypted; members not scanned");
    return result;
  }

  // Decode folders lazily; mark those that are encrypted.
  const StreamsInfo& si = parsed.main;
  std::vector<std::size_t> folder_of_stream;
  std::vector<std::size_t> offset_in_folder;
  for (std::size_t fi = 0, s = 0; fi < si.folders.size(); ++fi) {
    std::uint64_t off = 0;
    for (std::uint64_t j = 0; j < si.folders[fi].num_substreams; ++j, ++s) {
      folder_of_stream.push_back(fi);
      offset_in_folder.push_back(static_cast<std::size_t>(off));
      if (s >= si.sub_sizes.size()) Reader::fail("substream count mismatch", 0);
      off += si.sub_sizes[s];
    }
  }
  std::vector<std::optional<Bytes>> folder_data(si.folders.size());
  std::vector<bool> folder_encrypted(si.folders.size(), false);

  std::size_t stream = 0;
  std::size_t empty_index = 0;
  for (std::size_t i = 0; i < parsed.num_files; ++i) {
    const std::string& name = parsed.names[i];
    const auto attr = parsed.attributes[i];
    const bool is_dir_attr = attr && (*attr & kAttrDirectory);
    const bool is_symlink =
        attr && (*attr & kAttrUnixExtension) && (((*attr >> 16) & 0170000) == 0120000);
    if (parsed.empty_stream[i]) {
      const bool empty_file = parsed.empty_file[empty_index];
      const bool anti = parsed.anti[empty_index];
      ++empty_index;
      if (anti) continue;
      const std::string path = sanitize_member_path(name);
      if (empty_file && !is_dir_attr) result.entries.push_back({path, {}});
      continue;
    }
    if (stream >= folder_of_stream.size()) Reader::fail("more files than streams", 0);
    const std::size_t s = stream++;
    const std::string path = sanitize_member_path(name);
    if (is_symlink) {
      result.notices.push_back("skipped symlink member: " + path);
      continue;
    }
    const std::size_t fi = folder_of_stream[s];
    if (folder_encrypted[fi]) {
      result.notices.push_back("encrypted member not scanned: " + path);
      continue;
    }
    if (!folder_data[fi]) {
      try {
        Bytes decoded = decode_folder(data, si, fi, budget);
        if (si.folders[fi].crc && crc32_of(decoded) != *si.folders[fi].crc) {
          throw Error(ErrorKind::kExtraction,
                      "corrupt 7z: folder " + std::to_string(fi) + " CRC mismatch");
        }
        folder_data[fi] = std::move(decoded);
      } catch (const EncryptedFolder&) {
        folder_encrypted[fi] = true;
        result.encrypted = true;
        result.notices.push_back("encrypted member not scanned: " + path);
        continue;
      }
    }
    const Bytes& fd = *folder_data[fi];
    const std::uint64_t len = si.sub_sizes[s];
    const std::size_t off = offset_in_folder[s];
    if (off + len > fd.size()) Reader::fail("substream beyond folder data", 0);
    Bytes content(fd.begin() + static_cast<std::ptrdiff_t>(off),
                  fd.begin() + static_cast<std::ptrdiff_t>(off + len));
    if (si.sub_crcs[s] && crc32_of(content) != *si.sub_crcs[s]) {
      throw Error(ErrorKind::kExtraction, "corrupt 7z: CRC mismatch for " + path);
    }
    result.entries.push_back({path, std::move(content)});
  }
  return result;
}

}  // namespace slsa::archive::detail
