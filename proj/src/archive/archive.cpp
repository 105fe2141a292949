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
#include <map>
#include <set>

#include "detail.hpp"

namespace slsa::archive {

using detail::Codec;
using detail::OutputBudget;

std::string_view to_string(ArchiveFormat f) {
  switch (f) {
    case ArchiveFormat::kSevenZ: return "7z";
    case ArchiveFormat::kTar: return "tar";
    case ArchiveFormat::kTarBz2: return "tar.bz2";
    case ArchiveFormat::kTarGz: return "tar.gz";
    case ArchiveFormat::kTarLzma: return "tar.lzma";
    case ArchiveFormat::kTarXz: return "tar.xz";
    case ArchiveFormat::kTarZst: return "tar.zst";
    case ArchiveFormat::kZip: return "zip";
  }
  return "?";
}

std::string supported_formats_list() {
  std::string out;
  for (auto f : kAllFormats) {
    if (!out.empty()) out += ", ";
    out += to_string(f);
  }
  return out;
}

ArchiveFormat parse_format(std::string_view text) {
  const std::string t = to_lower(trim(text));
  for (auto f : kAllFormats) {
    if (t == to_string(f)) return f;
  }
  if (t == "sevenz") return ArchiveFormat::kSevenZ;
  if (t == "tar_bz2" || t == "tbz2") return ArchiveFormat::kTarBz2;
  if (t == "tar_gz" || t == "tgz") return ArchiveFormat::kTarGz;
  if (t == "tar_lzma" || t == "tlz") return ArchiveFormat::kTarLzma;
  if (t == "tar_xz" || t == "txz") return ArchiveFormat::kTarXz;
  if (t == "tar_zst" || t == "tzst") return ArchiveFormat::kTarZst;
  throw Error(ErrorKind::kUnsupportedFormat,
              "unsupported archive format '" + std::string(text) +
                  "'; supported: " + supported_formats_list());
}

namespace {

bool starts_with(std::span<const std::uint8_t> d, std::initializer_list<std::uint8_t> magic) {
  if (d.size() < magic.size()) return false;
  return std::equal(magic.begin(), magic.end(), d.begin());
}

bool ends_with_ci(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && iequals(s.substr(s.size() - suffix.size()), suffix);
}

bool looks_like_tar(std::span<const std::uint8_t> d) {
  if (d.size() < 512) return false;
  if (std::memcmp(d.data() + 257, "ustar", 5) == 0) return true;
  // Pre-POSIX tar: only the header checksum identifies it.
  std::uint64_t stored = 0;
  bool digits = false;
  for (std::size_t i = 148; i < 156; ++i) {
    if (d[i] >= '0' && d[i] <= '7') {
      stored = stored * 8 + (d[i] - '0');
      digits = true;
    } else if (digits) {
      break;
    }
  }
  if (!digits) return false;
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < 512; ++i) sum += (i >= 148 && i < 156) ? ' ' : d[i];
  return sum == stored;
}

bool lzma_alone_header(std::span<const std::uint8_t> d) {
  // Properties byte (lc/lp/pb) must be < 225; dictionary size follows.
  return d.size() >= 13 && d[0] < 225;
}

Codec codec_for(ArchiveFormat f) {
  switch (f) {
    case ArchiveFormat::kTarBz2: return Codec::kBzip2;
    case ArchiveFormat::kTarGz: return Codec::kGzip;
    case ArchiveFormat::kTarLzma: return Codec::kLzmaAlone;
    case ArchiveFormat::kTarXz: return Codec::kXz;
    case ArchiveFormat::kTarZst: return Codec::kZstd;
    default: break;
  }
  throw Error(ErrorKind::kUnsupportedFormat, "format has no compression wrapper");
}

}  // namespace

std::optional<ArchiveFormat> sniff_format(std::string_view filename,
                                          std::span<const std::uint8_t> leading) {
  if (starts_with(leading, {'P', 'K', 0x03, 0x04}) || starts_with(leading, {'P', 'K', 0x05, 0x06})) {
    return ArchiveFormat::kZip;
  }
  if (starts_with(leading, {'7', 'z', 0xBC, 0xAF, 0x27, 0x1C})) return ArchiveFormat::kSevenZ;
  if (starts_with(leading, {0x1F, 0x8B})) return ArchiveFormat::kTarGz;
  if (starts_with(leading, {'B', 'Z', 'h'})) return ArchiveFormat::kTarBz2;
  if (starts_with(leading, {0xFD, '7', 'z', 'X', 'Z', 0x00})) return ArchiveFormat::kTarXz;
  if (starts_with(leading, {0x28, 0xB5, 0x2F, 0xFD})) return ArchiveFormat::kTarZst;
  if (looks_like_tar(leading)) return ArchiveFormat::kTar;
  // Legacy .lzma has no magic; the name decides.
  if ((ends_with_ci(filename, ".lzma") || ends_with_ci(filename, ".tlz")) &&
      lzma_alone_header(leading)) {
    return ArchiveFormat::kTarLzma;
  }
  return std::nullopt;
}

ArchiveFormat detect_format(std::string_view filename, std::span<const std::uint8_t> leading) {
  if (auto f = sniff_format(filename, leading)) return *f;
  throw Error(ErrorKind::kUnsupportedFormat,
              "unrecognized archive format for '" + std::string(filename) +
                  "'; supported: " + supported_formats_list());
}

ExtractResult extract(std::span<const std::uint8_t> archive, ArchiveFormat format,
                      const ExtractLimits& limits) {
  OutputBudget budget(archive.size(), limits);
  switch (format) {
    case ArchiveFormat::kZip:
      return detail::read_zip(archive, budget);
    case ArchiveFormat::kSevenZ:
      return detail::read_7z(archive, budget);
    case ArchiveFormat::kTar: {
      // Members are views into the input; the budget only guards wrappers.
      OutputBudget unlimited(archive.size(), {1e18, ~std::uint64_t{0}});
      return detail::read_tar(archive, unlimited);
    }
    default: {
      const Bytes inner = detail::decompress(codec_for(format), archive, budget);
      if (!inner.empty() && !looks_like_tar(inner)) {
        throw Error(ErrorKind::kExtraction, "decompressed " + std::string(to_string(format)) +
                                                " payload is not a tar archive (offset 0)");
      }
      OutputBudget unlimited(inner.size(), {1e18, ~std::uint64_t{0}});
      return detail::read_tar(inner, unlimited);
    }
  }
}

ExtractResult extract_file(const fs::path& path, ArchiveFormat format,
                           const ExtractLimits& limits) {
  const Bytes data = read_binary_file(path);
  return extract(data, format, limits);
}

Bytes pack(std::vector<ArchiveEntry> entries, ArchiveFormat format) {
  for (auto& e : entries) e.path = detail::sanitize_member_path(e.path);
  std::sort(entries.begin(), entries.end(),
            [](const ArchiveEntry& a, const ArchiveEntry& b) { return a.path < b.path; });
  for (std::size_t i = 1; i < entries.size(); ++i) {
    if (entries[i].path == entries[i - 1].path) {
      throw Error(ErrorKind::kConsistency, "duplicate archive member: " + entries[i].path);
    }
  }
  switch (format) {
    case ArchiveFormat::kZip:
      return detail::write_zip(entries);
    case ArchiveFormat::kSevenZ:
      return detail::write_7z(entries);
    case ArchiveFormat::kTar:
      return detail::write_tar(entries);
    default:
      return detail::compress(codec_for(format), detail::write_tar(entries));
  }
}

std::vector<ArchiveEntry> read_tree(const fs::path& dir) {
  std::vector<ArchiveEntry> out;
  for (const auto& file : list_files_sorted(dir)) {
    out.push_back({fs::relative(file, dir).generic_string(), read_binary_file(file)});
  }
  return out;
}

Bytes inject_and_pack(std::vector<ArchiveEntry> benign, const ArchiveEntry& payload,
                      ArchiveFormat format, std::string_view inject_dir) {
  if (benign.empty()) throw Error(ErrorKind::kEmptyInput, "benign tree is empty");
  std::string dir(inject_dir);
  while (!dir.empty() && dir.back() == '/') dir.pop_back();
  ArchiveEntry placed = payload;
  placed.path = detail::sanitize_member_path(dir.empty() ? payload.path : dir + "/" + payload.path);
  for (const auto& e : benign) {
    if (detail::sanitize_member_path(e.path) == placed.path) {
      throw Error(ErrorKind::kConsistency, "payload path already exists in tree: " + placed.path);
    }
  }
  benign.push_back(std::move(placed));
  return pack(std::move(benign), format);
}

Bytes inject_and_pack(const fs::path& benign_tree, const fs::path& payload_file,
                      ArchiveFormat format, std::string_view inject_dir) {
  ArchiveEntry payload{payload_file.filename().generic_string(), read_binary_file(payload_file)};
  return inject_and_pack(read_tree(benign_tree), payload, format, inject_dir);
}

// ---------------------------------------------------------------------------
// Scanning

namespace {

void scan_into(std::span<const ArchiveEntry> entries, std::span<const Signature> signatures,
               int depth, const ExtractLimits& limits, const std::string& prefix,
               ScanResult& out) {
  for (const auto& e : entries) {
    const std::string path = prefix + e.path;
    for (const auto& sig : signatures) {
      if (signature_matches(sig, e.data)) out.matches.push_back({sig.id, sig.engine, path});
    }
    if (depth <= 0) continue;
    const auto format = sniff_format(e.path, e.data);
    if (!format) continue;
    try {
      ExtractResult inner = extract(e.data, *format, limits);
      for (const auto& n : inner.notices) out.notices.push_back(path + ": " + n);
      if (inner.encrypted) {
        out.encrypted = true;
        out.problems.push_back({path, ErrorKind::kExtraction, "encrypted archive content"});
      }
      scan_into(inner.entries, signatures, depth - 1, limits, path + "!", out);
    } catch (const Error& err) {
      out.problems.push_back({path, err.kind(), err.what()});
      out.notices.push_back(path + ": " + err.what());
    }
  }
}

}  // namespace

ScanResult scan_entries(std::span<const ArchiveEntry> entries,
                        std::span<const Signature> signatures, int recursion_depth,
                        const ExtractLimits& limits) {
  if (recursion_depth < 0) throw Error(ErrorKind::kRange, "recursion depth must be >= 0");
  ScanResult out;
  scan_into(entries, signatures, recursion_depth, limits, "", out);
  return out;
}

ScanResult scan_archive_file(const fs::path& path, std::span<const Signature> signatures,
                             int recursion_depth, const ExtractLimits& limits) {
  if (recursion_depth < 0) throw Error(ErrorKind::kRange, "recursion depth must be >= 0");
  ScanResult out;
  const std::string name = path.filename().generic_string();
  try {
    const Bytes data = read_binary_file(path);
    for (const auto& sig : signatures) {
      if (signature_matches(sig, data)) out.matches.push_back({sig.id, sig.engine, name});
    }
    const ArchiveFormat format = detect_format(name, data);
    ExtractResult inner = extract(data, format, limits);
    out.notices = inner.notices;
    if (inner.encrypted) {
      out.encrypted = true;
      out.problems.push_back({name, ErrorKind::kExtraction, "encrypted archive content"});
    }
    scan_into(inner.entries, signatures, recursion_depth, limits, name + "!", out);
  } catch (const Error& err) {
    out.problems.push_back({name, err.kind(), err.what()});
  }
  return out;
}

std::vector<EngineVerdict> engine_verdicts(const ScanResult& scan,
                                           std::span<const Signature> signatures) {
  std::map<std::string, std::set<std::string>> by_engine;
  for (const auto& s : signatures) by_engine[s.engine];
  for (const auto& m : scan.matches) by_engine[m.engine].insert(m.signature_id);
  std::vector<EngineVerdict> out;
  for (auto& [engine, ids] : by_engine) {
    out.push_back({engine, !ids.empty(), std::vector<std::string>(ids.begin(), ids.end())});
  }
  return out;
}

Consensus consensus_flag(std::span<const EngineVerdict> verdicts, int threshold) {
  if (threshold < 1) throw Error(ErrorKind::kRange, "consensus threshold must be >= 1");
  const auto flagged = static_cast<int>(
      std::count_if(verdicts.begin(), verdicts.end(), [](const EngineVerdict& v) { return v.flagged; }));
  return {flagged >= threshold, flagged};
}

}  // namespace slsa::archive
