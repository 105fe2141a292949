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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slsa_audit/error.hpp"
#include "slsa_audit/util.hpp"

namespace slsa::archive {

namespace fs = std::filesystem;

enum class ArchiveFormat { kSevenZ, kTar, kTarBz2, kTarGz, kTarLzma, kTarXz, kTarZst, kZip };

inline constexpr ArchiveFormat kAllFormats[] = {
    ArchiveFormat::kSevenZ, ArchiveFormat::kTar,    ArchiveFormat::kTarBz2,
    ArchiveFormat::kTarGz,  ArchiveFormat::kTarLzma, ArchiveFormat::kTarXz,
    ArchiveFormat::kTarZst, ArchiveFormat::kZip};

// "7z", "tar", "tar.bz2", "tar.gz", "tar.lzma", "tar.xz", "tar.zst", "zip".
std::string_view to_string(ArchiveFormat f);
ArchiveFormat parse_format(std::string_view text);
std::string supported_formats_list();

struct ArchiveEntry {
  std::string path;
  Bytes data;

  bool operator==(const ArchiveEntry&) const = default;
};

struct ExtractLimits {
  double max_ratio = 1000.0;
  std::uint64_t max_output_bytes = std::uint64_t{1} << 30;
};

struct ExtractResult {
  std::vector<ArchiveEntry> entries;
  std::vector<std::string> notices;
  // Set when any member (or the header) could not be read because it is
  // encrypted.
  bool encrypted = false;
};

// Magic bytes decide; the file name only disambiguates formats without a
// reliable magic (legacy .lzma) and never overrides a recognized magic.
std::optional<ArchiveFormat> sniff_format(std::string_view filename,
                                          std::span<const std::uint8_t> leading);
// As sniff_format, but throws Error(kUnsupportedFormat) listing the kinds.
ArchiveFormat detect_format(std::string_view filename,
                            std::span<const std::uint8_t> leading);

// Regular-file members in archive order. Throws Error with kExtraction
// (corrupt, message carries the offset), kSecurity (path traversal) or kBomb.
ExtractResult extract(std::span<const std::uint8_t> archive, ArchiveFormat format,
                      const ExtractLimits& limits = {});
ExtractResult extract_file(const fs::path& path, ArchiveFormat format,
                           const ExtractLimits& limits = {});

// Deterministic archive: sorted paths, zeroed timestamps and ownership.
Bytes pack(std::vector<ArchiveEntry> entries, ArchiveFormat format);

// Regular files under dir as entries with generic relative paths.
std::vector<ArchiveEntry> read_tree(const fs::path& dir);

// Adds payload under inject_dir (empty = archive root) and packs.
Bytes inject_and_pack(std::vector<ArchiveEntry> benign, const ArchiveEntry& payload,
                      ArchiveFormat format, std::string_view inject_dir = "");
Bytes inject_and_pack(const fs::path& benign_tree, const fs::path& payload_file,
                      ArchiveFormat format, std::string_view inject_dir = "");

// ---------------------------------------------------------------------------
// Signatures

enum class SignatureKind { kExactBytes, kSha256, kSubstring };

std::string_view to_string(SignatureKind k);

struct Signature {
  std::string id;
  SignatureKind kind = SignatureKind::kSubstring;
  Bytes pattern;  // raw digest bytes for kSha256
  std::string description;
  std::string engine = "builtin";
};

// The 68-byte EICAR antivirus test string.
inline constexpr std::string_view kEicar =
    "X5O!P%@AP[4\\PZX54(P^)7CC)7}$EICAR-STANDARD-ANTIVIRUS-TEST-FILE!$H+H*";

std::vector<Signature> builtin_signatures();

// Payload roles with operator-filled hash slots in the shipped signature DB.
std::vector<std::string> payload_role_slots();

struct SignatureDb {
  std::vector<Signature> signatures;
  std::vector<std::string> notices;
};

// JSON lines: {"id", "kind", "pattern" | "pattern_hex", "description", "engine"}.
// Entries with an empty pattern are placeholders and are skipped with a notice.
SignatureDb parse_signature_db(std::string_view jsonl);
SignatureDb load_signature_db(const fs::path& path);

bool signature_matches(const Signature& sig, std::span<const std::uint8_t> data);

struct SignatureMatch {
  std::string signature_id;
  std::string engine;
  std::string path;  // nested members use "outer!inner" paths

  bool operator==(const SignatureMatch&) const = default;
};

struct ScanProblem {
  std::string path;
  ErrorKind kind = ErrorKind::kExtraction;
  std::string message;
};

struct ScanResult {
  std::vector<SignatureMatch> matches;
  std::vector<ScanProblem> problems;
  std::vector<std::string> notices;
  bool encrypted = false;
};

// Checks every entry against every signature. Entries that are archives are
// expanded (depth - 1) while recursion_depth > 0.
ScanResult scan_entries(std::span<const ArchiveEntry> entries,
                        std::span<const Signature> signatures, int recursion_depth,
                        const ExtractLimits& limits = {});

// Extracts the file, then scans its members; paths are prefixed "<name>!".
// Top-level extraction failures are reported as problems rather than thrown.
ScanResult scan_archive_file(const fs::path& path, std::span<const Signature> signatures,
                             int recursion_depth, const ExtractLimits& limits = {});

struct EngineVerdict {
  std::string engine_id;
  bool flagged = false;
  std::vector<std::string> matched_signatures;
};

// One verdict per engine named in `signatures`, sorted by engine id.
std::vector<EngineVerdict> engine_verdicts(const ScanResult& scan,
                                           std::span<const Signature> signatures);

struct Consensus {
  bool malicious = false;
  int engines_flagging = 0;
};

Consensus consensus_flag(std::span<const EngineVerdict> verdicts, int threshold);

}  // namespace slsa::archive
