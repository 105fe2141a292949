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

#include "slsa_audit/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <thread>

#include "slsa_audit/util.hpp"

namespace slsa::ingest {

std::string_view to_string(ArtifactKind kind) {
  switch (kind) {
    case ArtifactKind::kSourceTree: return "SourceTree";
    case ArtifactKind::kArchive: return "Archive";
    case ArtifactKind::kImageLayout: return "ImageLayout";
  }
  return "SourceTree";
}

namespace {

bool valid_key(std::string_view key) {
  if (key.empty()) return false;
  return std::all_of(key.begin(), key.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  });
}

ArtifactKind infer_kind(const CorpusEntry& entry) {
  if (auto it = entry.metadata.find("artifact_kind"); it != entry.metadata.end()) {
    for (auto k : {ArtifactKind::kSourceTree, ArtifactKind::kArchive,
                   ArtifactKind::kImageLayout}) {
      if (iequals(it->second, to_string(k))) return k;
    }
    throw ParseError("unknown artifact_kind '" + it->second + "'", 0);
  }
  std::error_code ec;
  if (fs::is_directory(entry.tree_dir(), ec)) return ArtifactKind::kSourceTree;
  if (fs::is_directory(entry.archives_dir(), ec)) return ArtifactKind::kArchive;
  if (fs::is_directory(entry.root_path / "image", ec)) {
    return ArtifactKind::kImageLayout;
  }
  return ArtifactKind::kSourceTree;
}

}  // namespace

CorpusEntry parse_manifest(std::string_view text, const fs::path& component_dir) {
  CorpusEntry entry;
  entry.root_path = component_dir;
  int line_no = 0;
  for (const auto& line : split_lines(text)) {
    ++line_no;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("expected key=value", line_no);
    }
    std::string key = line.substr(0, eq);
    if (!valid_key(key)) {
      throw ParseError("manifest key '" + key + "' must be lowercase ASCII", line_no);
    }
    if (entry.metadata.count(key)) {
      throw ParseError("duplicate manifest key '" + key + "'", line_no);
    }
    entry.metadata.emplace(key, line.substr(eq + 1));
    entry.key_order.push_back(std::move(key));
  }

  const auto require = [&](const char* key) -> const std::string& {
    auto it = entry.metadata.find(key);
    if (it == entry.metadata.end() || trim(it->second).empty()) {
      throw ParseError(std::string("missing required key '") + key + "'", line_no);
    }
    return it->second;
  };
  try {
    entry.ref.repository = parse_repository(trim(require("repository")));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what(), line_no);
  }
  entry.ref.publisher = std::string(trim(require("publisher")));
  entry.ref.name = std::string(trim(require("name")));
  if (auto it = entry.metadata.find("version");
      it != entry.metadata.end() && !trim(it->second).empty()) {
    entry.ref.version = std::string(trim(it->second));
  }
  entry.artifact_kind = infer_kind(entry);
  return entry;
}

std::string serialize_manifest(const CorpusEntry& entry) {
  std::string out;
  for (const auto& key : entry.key_order) {
    out += key;
    out += '=';
    out += entry.metadata.at(key);
    out += '\n';
  }
  return out;
}

std::string component_dir_name(const ComponentRef& ref) {
  const auto sanitize = [](std::string s) {
    for (char& c : s) {
      if (c == '/' || c == '\\' || c == ':') c = '_';
    }
    return s;
  };
  return sanitize(ref.publisher) + "__" + sanitize(ref.name);
}

CorpusLoad load_corpus(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw Error(ErrorKind::kNotFound, "corpus root not found: " + root.string());
  }
  std::vector<fs::path> dirs;
  for (const auto& d : fs::directory_iterator(root)) {
    if (!d.is_directory()) continue;
    const auto name = d.path().filename().string();
    if (name.empty() || name.front() == '.') continue;
    dirs.push_back(d.path());
  }
  std::sort(dirs.begin(), dirs.end());

  CorpusLoad result;
  std::set<ComponentRef> seen;
  for (const auto& dir : dirs) {
    const fs::path manifest = dir / kManifestName;
    if (!fs::is_regular_file(manifest, ec)) {
      result.errors.push_back({manifest, 0, "missing component.meta"});
      continue;
    }
    try {
      CorpusEntry entry = parse_manifest(read_text_file(manifest), dir);
      if (!seen.insert(entry.ref).second) {
        result.errors.push_back(
            {manifest, 0, "duplicate component " + entry.ref.display()});
        continue;
      }
      result.entries.push_back(std::move(entry));
    } catch (const ParseError& e) {
      result.errors.push_back({manifest, e.line(), e.what()});
    } catch (const Error& e) {
      result.errors.push_back({manifest, 0, e.what()});
    }
  }
  return result;
}

bool is_serverless(const CorpusEntry& entry) {
  if (icontains(entry.ref.name, "serverless")) return true;
  for (const auto& [key, value] : entry.metadata) {
    if (icontains(value, "serverless")) return true;
  }
  std::error_code ec;
  if (!fs::is_directory(entry.root_path, ec)) {
    throw Error(ErrorKind::kIo,
                "component tree unreadable: " + entry.root_path.string());
  }
  for (auto it = fs::recursive_directory_iterator(entry.root_path, ec);
       it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (ec) {
      throw Error(ErrorKind::kIo, "error walking " + entry.root_path.string() +
                                      ": " + ec.message());
    }
    if (it->path().filename() == "serverless.yml" && it->is_regular_file(ec)) {
      return true;
    }
  }
  if (ec) {
    throw Error(ErrorKind::kIo, "error walking " + entry.root_path.string());
  }
  return false;
}

// ---------------------------------------------------------------------------

Clock::duration SystemClock::now() const {
  return std::chrono::duration_cast<duration>(
      std::chrono::steady_clock::now().time_since_epoch());
}

void SystemClock::sleep_for(duration d) { std::this_thread::sleep_for(d); }

namespace {

class RequestPacer {
 public:
  RequestPacer(Clock& clock, double per_minute, const FetchOptions& options)
      : clock_(clock),
        interval_(static_cast<Clock::duration::rep>(60000.0 / per_minute)),
        options_(options) {}

  template <typename F>
  auto call(F&& request) {
    auto backoff = options_.initial_backoff;
    for (int attempt = 0;; ++attempt) {
      wait_turn();
      ++requests_;
      try {
        return request();
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::kRateLimit ||
            attempt >= options_.max_rate_limit_retries) {
          throw;
        }
        clock_.sleep_for(backoff);
        backoff *= 2;
      }
    }
  }

  int requests() const { return requests_; }

 private:
  void wait_turn() {
    if (last_) {
      const auto ready = *last_ + interval_;
      const auto now = clock_.now();
      if (now < ready) clock_.sleep_for(ready - now);
    }
    last_ = clock_.now();
  }

  Clock& clock_;
  Clock::duration interval_;
  FetchOptions options_;
  std::optional<Clock::duration> last_;
  int requests_ = 0;
};

}  // namespace

FetchResult fetch_components(const FetchSpec& spec, RegistryClient& client,
                             const fs::path& corpus_root, Clock& clock,
                             const FetchOptions& options) {
  if (!(spec.rate_limit_per_minute > 0)) {
    throw Error(ErrorKind::kConfig, "rate_limit must be positive");
  }
  RequestPacer pacer(clock, spec.rate_limit_per_minute, options);
  const fs::path staging = corpus_root / ".fetch-staging";
  fs::remove_all(staging);

  std::vector<std::pair<fs::path, fs::path>> staged;
  try {
    auto listing = pacer.call([&] { return client.list(spec); });
    std::sort(listing.begin(), listing.end(),
              [](const RemoteComponent& a, const RemoteComponent& b) {
                return a.ref < b.ref;
              });
    for (const auto& remote : listing) {
      auto meta = pacer.call([&] { return client.get_metadata(spec, remote.id); });
      const std::string dir_name = component_dir_name(remote.ref);
      const fs::path dest = staging / dir_name;
      fs::create_directories(dest);
      pacer.call([&] {
        client.download(spec, remote.id, dest);
        return 0;
      });

      CorpusEntry entry;
      entry.ref = remote.ref;
      entry.root_path = dest;
      const auto put = [&](const std::string& key, const std::string& value) {
        if (entry.metadata.emplace(key, value).second) entry.key_order.push_back(key);
      };
      put("repository", std::string(to_string(remote.ref.repository)));
      put("publisher", remote.ref.publisher);
      put("name", remote.ref.name);
      if (remote.ref.version) put("version", *remote.ref.version);
      for (const auto& [key, value] : meta) {
        const std::string lowered = to_lower(key);
        if (lowered.find('\n') != std::string::npos ||
            value.find('\n') != std::string::npos) {
          continue;
        }
        put(lowered, value);
      }
      write_binary_file(dest / kManifestName, to_bytes(serialize_manifest(entry)));
      staged.emplace_back(dest, corpus_root / dir_name);
    }
  } catch (...) {
    fs::remove_all(staging);
    throw;
  }

  FetchResult result;
  for (const auto& [from, to] : staged) {
    fs::remove_all(to);
    fs::rename(from, to);
    result.entries.push_back(parse_manifest(read_text_file(to / kManifestName), to));
  }
  fs::remove_all(staging);
  result.requests = pacer.requests();
  return result;
}

FilesystemRegistryClient::FilesystemRegistryClient(
    fs::path source_root, std::optional<std::string> valid_token)
    : source_root_(std::move(source_root)), valid_token_(std::move(valid_token)) {
  entries_ = load_corpus(source_root_).entries;
}

void FilesystemRegistryClient::fail_next(ErrorKind kind, int count) {
  pending_kind_ = kind;
  pending_failures_ = count;
}

void FilesystemRegistryClient::on_request(const FetchSpec& spec) {
  if (valid_token_ && spec.auth_token != valid_token_) {
    throw Error(ErrorKind::kAuth, "authentication failed: token rejected");
  }
  if (pending_failures_ > 0) {
    --pending_failures_;
    throw Error(pending_kind_, "injected registry failure");
  }
}

const CorpusEntry& FilesystemRegistryClient::find(const std::string& id) const {
  for (const auto& e : entries_) {
    if (component_dir_name(e.ref) == id) return e;
  }
  throw Error(ErrorKind::kNotFound, "no such component: " + id);
}

std::vector<RemoteComponent> FilesystemRegistryClient::list(const FetchSpec& spec) {
  on_request(spec);
  std::vector<RemoteComponent> out;
  for (const auto& e : entries_) {
    bool match = spec.query.empty() || icontains(e.ref.name, spec.query);
    for (const auto& [key, value] : e.metadata) {
      if (key != "repository" && icontains(value, spec.query)) match = true;
    }
    if (match) out.push_back({component_dir_name(e.ref), e.ref});
  }
  return out;
}

std::map<std::string, std::string> FilesystemRegistryClient::get_metadata(
    const FetchSpec& spec, const std::string& id) {
  on_request(spec);
  auto meta = find(id).metadata;
  for (const char* key : {"repository", "publisher", "name", "version"}) {
    meta.erase(key);
  }
  return meta;
}

void FilesystemRegistryClient::download(const FetchSpec& spec,
                                        const std::string& id,
                                        const fs::path& dest) {
  on_request(spec);
  const auto& entry = find(id);
  for (const auto& d : fs::directory_iterator(entry.root_path)) {
    if (d.path().filename() == kManifestName) continue;
    fs::copy(d.path(), dest / d.path().filename(),
             fs::copy_options::recursive | fs::copy_options::overwrite_existing);
  }
}

}  // namespace slsa::ingest
