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

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slsa_audit/error.hpp"
#include "slsa_audit/model.hpp"

namespace slsa::ingest {

namespace fs = std::filesystem;

inline constexpr const char* kManifestName = "component.meta";

enum class ArtifactKind { kSourceTree, kArchive, kImageLayout };

std::string_view to_string(ArtifactKind kind);

struct CorpusEntry {
  ComponentRef ref;
  fs::path root_path;
  // Every manifest line, including the identity keys, keyed by lowercase name.
  std::map<std::string, std::string> metadata;
  // Keys in manifest order so a loaded manifest re-serializes byte-identically.
  std::vector<std::string> key_order;
  ArtifactKind artifact_kind = ArtifactKind::kSourceTree;

  fs::path tree_dir() const { return root_path / "tree"; }
  fs::path archives_dir() const { return root_path / "archives"; }
  fs::path iac_dir() const { return root_path / "iac"; }
  fs::path run_commands_path() const { return root_path / "run_commands.txt"; }
};

struct ManifestError {
  fs::path path;
  int line = 0;
  std::string message;
};

struct CorpusLoad {
  std::vector<CorpusEntry> entries;
  std::vector<ManifestError> errors;
};

// Parses one `component.meta` body. Throws ParseError naming the line.
CorpusEntry parse_manifest(std::string_view text, const fs::path& component_dir);

std::string serialize_manifest(const CorpusEntry& entry);

// `<publisher>__<name>`; the version is part of the manifest, not the path.
std::string component_dir_name(const ComponentRef& ref);

// Loads every `<root>/<dir>/component.meta`. Malformed manifests become
// ManifestError records. Throws Error(kNotFound) when root is missing.
CorpusLoad load_corpus(const fs::path& root);

// Keyword match on name/metadata, or a `serverless.yml` anywhere in the tree.
bool is_serverless(const CorpusEntry& entry);

// ---------------------------------------------------------------------------
// Fetching

struct FetchSpec {
  Repository repository = Repository::kLocalCorpus;
  std::string query;
  std::optional<std::string> auth_token;
  double rate_limit_per_minute = 60;
};

struct RemoteComponent {
  std::string id;
  ComponentRef ref;
};

// Contract for registry scrapers. Implementations throw Error with kAuth,
// kRateLimit or kNetwork.
class RegistryClient {
 public:
  virtual ~RegistryClient() = default;
  virtual std::vector<RemoteComponent> list(const FetchSpec& spec) = 0;
  virtual std::map<std::string, std::string> get_metadata(
      const FetchSpec& spec, const std::string& id) = 0;
  // Writes the component's artifacts (tree/, archives/, ...) into dest.
  virtual void download(const FetchSpec& spec, const std::string& id,
                        const fs::path& dest) = 0;
};

class Clock {
 public:
  using duration = std::chrono::milliseconds;
  virtual ~Clock() = default;
  virtual duration now() const = 0;
  virtual void sleep_for(duration d) = 0;
};

class SystemClock final : public Clock {
 public:
  duration now() const override;
  void sleep_for(duration d) override;
};

// Advances only when slept on.
class VirtualClock final : public Clock {
 public:
  duration now() const override { return now_; }
  void sleep_for(duration d) override { now_ += d; }

 private:
  duration now_{0};
};

struct FetchOptions {
  int max_rate_limit_retries = 3;
  Clock::duration initial_backoff{1000};
};

struct FetchResult {
  std::vector<CorpusEntry> entries;
  int requests = 0;
};

// Lists, describes and downloads every component matching spec.query into
// corpus_root using the corpus layout. Requests are spaced by
// 60s / rate_limit_per_minute. Nothing is left in corpus_root on failure.
FetchResult fetch_components(const FetchSpec& spec, RegistryClient& client,
                             const fs::path& corpus_root, Clock& clock,
                             const FetchOptions& options = {});

// Serves components from a directory that already uses the corpus layout.
// list() matches the query case-insensitively against name and metadata.
class FilesystemRegistryClient final : public RegistryClient {
 public:
  explicit FilesystemRegistryClient(fs::path source_root,
                                    std::optional<std::string> valid_token = {});

  std::vector<RemoteComponent> list(const FetchSpec& spec) override;
  std::map<std::string, std::string> get_metadata(const FetchSpec& spec,
                                                  const std::string& id) override;
  void download(const FetchSpec& spec, const std::string& id,
                const fs::path& dest) override;

  // Makes the next `count` requests fail with `kind` (test hook).
  void fail_next(ErrorKind kind, int count);

 private:
  void on_request(const FetchSpec& spec);
  const CorpusEntry& find(const std::string& id) const;

  fs::path source_root_;
  std::optional<std::string> valid_token_;
  std::vector<CorpusEntry> entries_;
  ErrorKind pending_kind_ = ErrorKind::kNetwork;
  int pending_failures_ = 0;
};

}  // namespace slsa::ingest
