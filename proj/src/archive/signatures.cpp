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
#include <functional>
#include <nlohmann/json.hpp>

#include "slsa_audit/archive.hpp"

namespace slsa::archive {

using nlohmann::json;

std::string_view to_string(SignatureKind k) {
  switch (k) {
    case SignatureKind::kExactBytes: return "exact-bytes";
    case SignatureKind::kSha256: return "sha256";
    case SignatureKind::kSubstring: return "substring";
  }
  return "?";
}

std::vector<Signature> builtin_signatures() {
  return {{"eicar", SignatureKind::kSubstring, to_bytes(kEicar),
           "EICAR antivirus test file", "builtin"}};
}

std::vector<std::string> payload_role_slots() {
  return {"eicar",         "python-rat",      "java-infector",
          "php-backdoor",  "python-backdoor", "python-trojan"};
}

namespace {

SignatureKind parse_kind(const std::string& s, int line) {
  if (s == "exact-bytes" || s == "exact") return SignatureKind::kExactBytes;
  if (s == "sha256") return SignatureKind::kSha256;
  if (s == "substring") return SignatureKind::kSubstring;
  throw ParseError("unknown signature kind '" + s + "'", line);
}

}  // namespace

SignatureDb parse_signature_db(std::string_view jsonl) {
  SignatureDb db;
  const auto lines = split_lines(jsonl);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const int line_no = static_cast<int>(i + 1);
    const std::string_view line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("invalid signature record: ") + e.what(), line_no);
    }
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string() ||
        j["id"].get<std::string>().empty()) {
      throw ParseError("signature record needs a non-empty string \"id\"", line_no);
    }
    Signature sig;
    sig.id = j["id"].get<std::string>();
    sig.kind = parse_kind(j.value("kind", std::string("substring")), line_no);
    sig.description = j.value("description", std::string());
    sig.engine = j.value("engine", std::string("builtin"));
    if (sig.engine.empty()) throw ParseError("signature engine must not be empty", line_no);
    try {
      if (j.contains("pattern_hex")) {
        sig.pattern = hex_decode(j["pattern_hex"].get<std::string>());
      } else if (j.contains("pattern")) {
        const std::string p = j["pattern"].get<std::string>();
        sig.pattern = sig.kind == SignatureKind::kSha256 ? hex_decode(p) : to_bytes(p);
      }
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad signature pattern: ") + e.what(), line_no);
    } catch (const Error& e) {
      throw ParseError(std::string("bad signature pattern: ") + e.what(), line_no);
    }
    if (sig.pattern.empty()) {
      db.notices.push_back("line " + std::to_string(line_no) + ": signature '" + sig.id +
                           "' has no pattern yet; skipped");
      continue;
    }
    if (sig.kind == SignatureKind::kSha256 && sig.pattern.size() != 32) {
      throw ParseError("sha256 signature '" + sig.id + "' needs 32 digest bytes", line_no);
    }
    db.signatures.push_back(std::move(sig));
  }
  return db;
}

SignatureDb load_signature_db(const fs::path& path) {
  return parse_signature_db(read_text_file(path));
}

bool signature_matches(const Signature& sig, std::span<const std::uint8_t> data) {
  if (sig.pattern.empty()) return false;
  switch (sig.kind) {
    case SignatureKind::kExactBytes:
      return data.size() == sig.pattern.size() &&
             std::equal(data.begin(), data.end(), sig.pattern.begin());
    case SignatureKind::kSha256: {
      const std::string digest = sha256_hex(data);
      return digest == hex_encode(sig.pattern);
    }
    case SignatureKind::kSubstring: {
      if (sig.pattern.size() > data.size()) return false;
      const auto it = std::search(data.begin(), data.end(),
                                  std::boyer_moore_horspool_searcher(sig.pattern.begin(),
                                                                     sig.pattern.end()));
      return it != data.end();
    }
  }
  return false;
}

}  // namespace slsa::archive
