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
#include <zlib.h>

#include <algorithm>
#include <boost/iostreams/copy.hpp>
#include <boost/iostreams/device/array.hpp>
#include <boost/iostreams/device/back_inserter.hpp>
#include <boost/iostreams/filter/bzip2.hpp>
#include <boost/iostreams/filter/gzip.hpp>
#include <boost/iostreams/filter/zstd.hpp>
#include <boost/iostreams/filtering_stream.hpp>
#include <cmath>
#include <memory>
#include <optional>

#include "detail.hpp"

namespace slsa::archive::detail {

namespace io = boost::iostreams;

OutputBudget::OutputBudget(std::uint64_t archive_size, const ExtractLimits& limits) {
  const double by_ratio = std::floor(limits.max_ratio * static_cast<double>(archive_size));
  limit_ = limits.max_output_bytes;
  if (by_ratio < static_cast<double>(limit_)) limit_ = static_cast<std::uint64_t>(by_ratio);
}

void OutputBudget::consume(std::uint64_t n) {
  used_ += n;
  if (used_ > limit_) {
    throw Error(ErrorKind::kBomb, "decompression bomb: output exceeds " +
                                      std::to_string(limit_) + " bytes");
  }
}

std::uint32_t crc32_of(std::span<const std::uint8_t> data) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  std::size_t off = 0;
  while (off < data.size()) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(data.size() - off, 1u << 30));
    crc = ::crc32(crc, data.data() + off, chunk);
    off += chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

namespace {

template <typename Filter>
Bytes boost_compress(Filter filter, std::span<const std::uint8_t> data) {
  std::string out;
  {
    io::filtering_ostream os;
    os.push(filter);
    os.push(io::back_inserter(out));
    os.write(reinterpret_cast<const char*>(data.data()),
             static_cast<std::streamsize>(data.size()));
  }
  return Bytes(out.begin(), out.end());
}

template <typename Filter>
Bytes boost_decompress(Filter filter, std::span<const std::uint8_t> data,
                       OutputBudget& budget, const char* name) {
  Bytes out;
  io::filtering_istream in;
  in.push(filter);
  in.push(io::array_source(reinterpret_cast<const char*>(data.data()), data.size()));
  in.exceptions(std::ios::badbit);
  std::vector<char> buf(1 << 16);
  try {
    while (in) {
      in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
      const auto n = static_cast<std::size_t>(in.gcount());
      if (n == 0) break;
      budget.consume(n);
      out.insert(out.end(), buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(n));
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorKind::kExtraction, std::string("corrupt ") + name +
                                            " stream near decompressed offset " +
                                            std::to_string(out.size()) + ": " + e.what());
  }
  return out;
}

struct LzmaStream {
  lzma_stream strm = LZMA_STREAM_INIT;
  ~LzmaStream() { lzma_end(&strm); }
};

Bytes lzma_run(lzma_stream& strm, std::span<const std::uint8_t> data, OutputBudget* budget,
               const char* name) {
  Bytes out;
  std::vector<std::uint8_t> buf(1 << 16);
  strm.next_in = data.data();
  strm.avail_in = data.size();
  while (true) {
    strm.next_out = buf.data();
    strm.avail_out = buf.size();
    const lzma_ret ret = lzma_code(&strm, LZMA_FINISH);
    const std::size_t produced = buf.size() - strm.avail_out;
    if (budget) budget->consume(produced);
    out.insert(out.end(), buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(produced));
    if (ret == LZMA_STREAM_END) break;
    if (ret != LZMA_OK) {
      throw Error(ErrorKind::kExtraction,
                  std::string("corrupt ") + name + " stream at input offset " +
                      std::to_string(data.size() - strm.avail_in) + " (lzma error " +
                      std::to_string(static_cast<int>(ret)) + ")");
    }
    if (produced == 0 && strm.avail_in == 0) {
      throw Error(ErrorKind::kExtraction, std::string("truncated ") + name + " stream at offset " +
                                              std::to_string(data.size()));
    }
  }
  return out;
}

// Walks zstd frame and block headers without decoding. The streaming
// decompressor stops quietly at a truncated frame, so completeness is checked
// structurally. Returns the offset where the input ends early, if it does.
std::optional<std::size_t> zstd_truncation_offset(std::span<const std::uint8_t> d) {
  auto u32 = [&](std::size_t o) {
    return static_cast<std::uint32_t>(d[o]) | (static_cast<std::uint32_t>(d[o + 1]) << 8) |
           (static_cast<std::uint32_t>(d[o + 2]) << 16) |
           (static_cast<std::uint32_t>(d[o + 3]) << 24);
  };
  std::size_t p = 0;
  while (p < d.size()) {
    if (d.size() - p < 4) return p;
    const std::uint32_t magic = u32(p);
    if ((magic & 0xFFFFFFF0u) == 0x184D2A50u) {
      if (d.size() - p < 8) return p;
      const std::uint64_t skip = u32(p + 4);
      if (skip > d.size() - p - 8) return p;
      p += 8 + static_cast<std::size_t>(skip);
      continue;
    }
    if (magic != 0xFD2FB528u) return std::nullopt;  // decoder reports garbage itself
    p += 4;
    if (p >= d.size()) return p;
    const std::uint8_t fhd = d[p++];
    const bool single_segment = (fhd >> 5) & 1;
    const bool checksum = (fhd >> 2) & 1;
    static constexpr std::size_t kDictIdSize[] = {0, 1, 2, 4};
    static constexpr std::size_t kFcsSize[] = {0, 2, 4, 8};
    std::size_t header = (single_segment ? 0 : 1) + kDictIdSize[fhd & 3];
    header += (fhd >> 6) == 0 ? (single_segment ? 1 : 0) : kFcsSize[fhd >> 6];
    if (header > d.size() - p) return d.size();
    p += header;
    bool last = false;
    while (!last) {
      if (d.size() - p < 3) return d.size();
      const std::uint32_t bh = d[p] | (d[p + 1] << 8) | (d[p + 2] << 16);
      p += 3;
      last = bh & 1;
      const std::uint32_t type = (bh >> 1) & 3;
      const std::size_t size = type == 1 ? 1 : (bh >> 3);
      if (type == 3 || size > d.size() - p) return d.size();
      p += size;
    }
    if (checksum) {
      if (d.size() - p < 4) return d.size();
      p += 4;
    }
  }
  return std::nullopt;
}

}  // namespace

Bytes compress(Codec codec, std::span<const std::uint8_t> data) {
  switch (codec) {
    case Codec::kGzip: {
      io::gzip_params params(io::gzip::default_compression);
      params.mtime = 0;
      return boost_compress(io::gzip_compressor(params), data);
    }
    case Codec::kBzip2:
      return boost_compress(io::bzip2_compressor(), data);
    case Codec::kZstd:
      return boost_compress(io::zstd_compressor(), data);
    case Codec::kXz: {
      LzmaStream s;
      if (lzma_easy_encoder(&s.strm, 6, LZMA_CHECK_CRC64) != LZMA_OK) {
        throw Error(ErrorKind::kIo, "xz encoder init failed");
      }
      return lzma_run(s.strm, data, nullptr, "xz");
    }
    case Codec::kLzmaAlone: {
      LzmaStream s;
      lzma_options_lzma opt;
      lzma_lzma_preset(&opt, 6);
      if (lzma_alone_encoder(&s.strm, &opt) != LZMA_OK) {
        throw Error(ErrorKind::kIo, "lzma encoder init failed");
      }
      return lzma_run(s.strm, data, nullptr, "lzma");
    }
  }
  return {};
}

Bytes decompress(Codec codec, std::span<const std::uint8_t> data, OutputBudget& budget) {
  switch (codec) {
    case Codec::kGzip:
      return boost_decompress(io::gzip_decompressor(), data, budget, "gzip");
    case Codec::kBzip2:
      return boost_decompress(io::bzip2_decompressor(), data, budget, "bzip2");
    case Codec::kZstd: {
      if (auto at = zstd_truncation_offset(data)) {
        throw Error(ErrorKind::kExtraction, "truncated zstd stream at offset " + std::to_string(*at));
      }
      return boost_decompress(io::zstd_decompressor(), data, budget, "zstd");
    }
    case Codec::kXz: {
      LzmaStream s;
      if (lzma_stream_decoder(&s.strm, UINT64_MAX, LZMA_CONCATENATED) != LZMA_OK) {
        throw Error(ErrorKind::kIo, "xz decoder init failed");
      }
      return lzma_run(s.strm, data, &budget, "xz");
    }
    case Codec::kLzmaAlone: {
      LzmaStream s;
      if (lzma_alone_decoder(&s.strm, UINT64_MAX) != LZMA_OK) {
        throw Error(ErrorKind::kIo, "lzma decoder init failed");
      }
      return lzma_run(s.strm, data, &budget, "lzma");
    }
  }
  return {};
}

Bytes deflate_raw(std::span<const std::uint8_t> data) {
  z_stream zs{};
  if (deflateInit2(&zs, Z_DEFAULT_COMPRESSION, Z_DEFLATED, -MAX_WBITS, 8,
                   Z_DEFAULT_STRATEGY) != Z_OK) {
    throw Error(ErrorKind::kIo, "deflate init failed");
  }
  Bytes out(deflateBound(&zs, static_cast<uLong>(data.size())));
  zs.next_in = const_cast<Bytef*>(data.data());
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = out.data();
  zs.avail_out = static_cast<uInt>(out.size());
  const int ret = deflate(&zs, Z_FINISH);
  const auto produced = zs.total_out;
  deflateEnd(&zs);
  if (ret != Z_STREAM_END) throw Error(ErrorKind::kIo, "deflate failed");
  out.resize(produced);
  return out;
}

Bytes inflate_raw(std::span<const std::uint8_t> data, std::uint64_t expected_size,
                  OutputBudget& budget, std::uint64_t offset) {
  z_stream zs{};
  if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) {
    throw Error(ErrorKind::kIo, "inflate init failed");
  }
  std::unique_ptr<z_stream, decltype(&inflateEnd)> guard(&zs, &inflateEnd);
  Bytes out;
  out.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(expected_size, budget.remaining())));
  std::vector<std::uint8_t> buf(1 << 16);
  zs.next_in = const_cast<Bytef*>(data.data());
  zs.avail_in = static_cast<uInt>(data.size());
  while (true) {
    zs.next_out = buf.data();
    zs.avail_out = static_cast<uInt>(buf.size());
    const int ret = inflate(&zs, Z_NO_FLUSH);
    const std::size_t produced = buf.size() - zs.avail_out;
    budget.consume(produced);
    out.insert(out.end(), buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(produced));
    if (ret == Z_STREAM_END) break;
    if (ret != Z_OK || (produced == 0 && zs.avail_in == 0)) {
      throw Error(ErrorKind::kExtraction,
                  "corrupt deflate data at offset " + std::to_string(offset + zs.total_in));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Raw liblzma coders for 7z folders.

Bytes lzma2_raw_encode(std::span<const std::uint8_t> data, std::uint8_t& property_byte) {
  lzma_options_lzma opt;
  lzma_lzma_preset(&opt, 6);
  lzma_filter filters[2] = {{LZMA_FILTER_LZMA2, &opt}, {LZMA_VLI_UNKNOWN, nullptr}};
  std::uint32_t prop_size = 0;
  lzma_properties_size(&prop_size, &filters[0]);
  std::uint8_t props[8] = {};
  lzma_properties_encode(&filters[0], props);
  property_byte = props[0];

  LzmaStream s;
  if (lzma_raw_encoder(&s.strm, filters) != LZMA_OK) {
    throw Error(ErrorKind::kIo, "lzma2 raw encoder init failed");
  }
  return lzma_run(s.strm, data, nullptr, "lzma2");
}

Bytes raw_decode_chain(std::span<const RawFilter> chain, std::span<const std::uint8_t> packed,
                       std::uint64_t unpack_size) {
  if (chain.empty()) return Bytes(packed.begin(), packed.end());
  std::vector<lzma_filter> filters;
  std::vector<void*> owned;
  struct Cleanup {
    std::vector<void*>& v;
    ~Cleanup() {
      for (void* p : v) free(p);
    }
  } cleanup{owned};
  for (const auto& f : chain) {
    lzma_filter lf{f.id, nullptr};
    if (lzma_properties_decode(&lf, nullptr, f.properties.data(), f.properties.size()) !=
        LZMA_OK) {
      throw Error(ErrorKind::kExtraction, "invalid 7z coder properties");
    }
    owned.push_back(lf.options);
    filters.push_back(lf);
  }
  filters.push_back({LZMA_VLI_UNKNOWN, nullptr});

  LzmaStream s;
  if (lzma_raw_decoder(&s.strm, filters.data()) != LZMA_OK) {
    throw Error(ErrorKind::kExtraction, "unsupported 7z coder chain");
  }
  Bytes out(static_cast<std::size_t>(unpack_size));
  s.strm.next_in = packed.data();
  s.strm.avail_in = packed.size();
  s.strm.next_out = out.data();
  s.strm.avail_out = out.size();
  // All input is present, so LZMA_FINISH from the start. LZMA1 streams in 7z
  // usually carry no end marker; the declared size is the terminator.
  while (s.strm.avail_out > 0) {
    const lzma_ret ret = lzma_code(&s.strm, LZMA_FINISH);
    if (ret == LZMA_STREAM_END) break;
    if (ret == LZMA_BUF_ERROR) {
      throw Error(ErrorKind::kExtraction, "truncated 7z packed stream");
    }
    if (ret != LZMA_OK) {
      throw Error(ErrorKind::kExtraction,
                  "corrupt 7z packed stream at offset " +
                      std::to_string(packed.size() - s.strm.avail_in));
    }
  }
  if (s.strm.avail_out != 0) {
    throw Error(ErrorKind::kExtraction, "7z packed stream shorter than declared size");
  }
  return out;
}

}  // namespace slsa::archive::detail
