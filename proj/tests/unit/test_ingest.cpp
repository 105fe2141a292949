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

#include <gtest/gtest.h>

#include <random>

#include "slsa_audit/error.hpp"
#include "slsa_audit/ingest.hpp"
#include "slsa_audit/util.hpp"
#include "test_support.hpp"

using namespace slsa;
using namespace slsa::ingest;
using testsupport::TempDir;

namespace {

void write(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  write_binary_file(p, to_bytes(text));
}

void make_component(const fs::path& root, const std::string& publisher, const std::string& name,
                    const std::string& extra = "") {
  const fs::path dir = root / (publisher + "__" + name);
  write(dir / kManifestName, "repository=DockerHub\npublisher=" + publisher + "\nname=" + name +
                                 "\nversion=1.0\n" + extra);
  fs::create_directories(dir / "tree");
}

}  // namespace

TEST(Manifest, ParsesIdentityAndExtras) {
  const auto e = parse_manifest(
      "repository=GitHub\npublisher=acme\nname=fn\nversion=2.1\ngithub_url=https://x\n", "/c");
  EXPECT_EQ(e.ref.repository, Repository::kGitHub);
  EXPECT_EQ(e.ref.publisher, "acme");
  EXPECT_EQ(e.ref.name, "fn");
  EXPECT_EQ(e.ref.version, "2.1");
  EXPECT_EQ(e.metadata.at("github_url"), "https://x");
}

TEST(Manifest, ErrorsNameTheLine) {
  try {
    parse_manifest("repository=GitHub\npublisher\nname=x\n", "/c");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
  EXPECT_THROW(parse_manifest("repository=GitHub\nname=x\n", "/c"), ParseError);
  EXPECT_THROW(parse_manifest("repository=Nowhere\npublisher=a\nname=x\n", "/c"), ParseError);
  EXPECT_THROW(parse_manifest("repository=GitHub\npublisher=a\npublisher=b\nname=x\n", "/c"),
               ParseError);
}

TEST(Manifest, RoundTripIsByteIdentical) {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 200; ++i) {
    std::string text = "repository=AwsSar\npublisher=" +
                       testsupport::random_string(rng, "abcxyz-", 1, 8) + "\nname=" +
                       testsupport::random_string(rng, "abc_123", 1, 10) + "\n";
    const int extras = testsupport::uniform(rng, 0, 4);
    for (int k = 0; k < extras; ++k) {
      text += "k" + std::to_string(k) + "=" + testsupport::random_string(rng, "ab =:/", 0, 12) +
              "\n";
    }
    EXPECT_EQ(serialize_manifest(parse_manifest(text, "/c")), text);
  }
}

TEST(LoadCorpus, ThreeValidManifests) {
  TempDir tmp;
  make_component(tmp.path(), "a", "one");
  make_component(tmp.path(), "b", "two");
  make_component(tmp.path(), "c", "three");
  const auto load = load_corpus(tmp.path());
  EXPECT_EQ(load.entries.size(), 3u);
  EXPECT_TRUE(load.errors.empty());
}

TEST(LoadCorpus, MalformedManifestIsReportedNotSkipped) {
  TempDir tmp;
  make_component(tmp.path(), "a", "one");
  make_component(tmp.path(), "b", "two");
  write(tmp / "broken/component.meta", "this is not a manifest\n");
  const auto load = load_corpus(tmp.path());
  EXPECT_EQ(load.entries.size(), 2u);
  ASSERT_EQ(load.errors.size(), 1u);
  EXPECT_EQ(load.errors[0].line, 1);
}

TEST(LoadCorpus, MissingRootIsNotFound) {
  try {
    load_corpus("/nonexistent/slsa-corpus");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNotFound);
  }
}

TEST(Serverless, KeywordOrFile) {
  TempDir tmp;
  make_component(tmp.path(), "redis", "redis-cache");
  make_component(tmp.path(), "x", "my-serverless-fn");
  make_component(tmp.path(), "y", "plain-fn");
  write(tmp / "y__plain-fn/tree/deploy/serverless.yml", "service: plain\n");
  make_component(tmp.path(), "z", "tagged", "description=A Serverless plugin\n");
  auto load = load_corpus(tmp.path());
  std::map<std::string, bool> got;
  for (const auto& e : load.entries) got[e.ref.name] = is_serverless(e);
  EXPECT_FALSE(got["redis-cache"]);
  EXPECT_TRUE(got["my-serverless-fn"]);
  EXPECT_TRUE(got["plain-fn"]);
  EXPECT_TRUE(got["tagged"]);

  // Removing the file flips a keyword-free entry.
  fs::remove(tmp / "y__plain-fn/tree/deploy/serverless.yml");
  load = load_corpus(tmp.path());
  for (const auto& e : load.entries) {
    if (e.ref.name == "plain-fn") EXPECT_FALSE(is_serverless(e));
  }
}

TEST(Fetch, FilesystemClientCopiesMatchingComponents) {
  TempDir src, dst;
  make_component(src.path(), "a", "serverless-api");
  make_component(src.path(), "b", "worker", "description=serverless worker\n");
  make_component(src.path(), "c", "redis");
  make_component(src.path(), "d", "nginx");
  make_component(src.path(), "e", "postgres");
  write(src / "a__serverless-api/tree/index.js", "module.exports = 1;\n");
  FilesystemRegistryClient client(src.path());
  VirtualClock clock;
  FetchSpec spec;
  spec.query = "serverless";
  const auto result = fetch_components(spec, client, dst.path(), clock);
  ASSERT_EQ(result.entries.size(), 2u);
  EXPECT_TRUE(fs::exists(dst / "a__serverless-api/tree/index.js"));
  EXPECT_EQ(load_corpus(dst.path()).entries.size(), 2u);
}

TEST(Fetch, RequestsArePaced) {
  TempDir src, dst;
  make_component(src.path(), "a", "serverless-one");
  make_component(src.path(), "b", "serverless-two");
  FilesystemRegistryClient client(src.path());
  VirtualClock clock;
  FetchSpec spec;
  spec.query = "serverless";
  spec.rate_limit_per_minute = 60;
  const auto result = fetch_components(spec, client, dst.path(), clock);
  // list + 2 * (metadata + download), one second apart.
  EXPECT_EQ(result.requests, 5);
  EXPECT_EQ(clock.now(), std::chrono::milliseconds(4000));
}

TEST(Fetch, RateLimitIsRetriedWithBackoff) {
  TempDir src, dst;
  make_component(src.path(), "a", "serverless-one");
  FilesystemRegistryClient client(src.path());
  client.fail_next(ErrorKind::kRateLimit, 2);
  VirtualClock clock;
  FetchSpec spec;
  spec.query = "serverless";
  spec.rate_limit_per_minute = 6000;
  const auto result = fetch_components(spec, client, dst.path(), clock);
  EXPECT_EQ(result.entries.size(), 1u);
  EXPECT_EQ(result.requests, 5);
}

TEST(Fetch, AuthFailureLeavesNothingBehind) {
  TempDir src, dst;
  make_component(src.path(), "a", "serverless-one");
  FilesystemRegistryClient client(src.path(), std::string("secret"));
  VirtualClock clock;
  FetchSpec spec;
  spec.auth_token = "wrong";
  try {
    fetch_components(spec, client, dst.path(), clock);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kAuth);
  }
  EXPECT_TRUE(fs::is_empty(dst.path()));
}

TEST(Fetch, NetworkFailureMidwayRollsBack) {
  TempDir src, dst;
  make_component(src.path(), "a", "serverless-one");
  make_component(src.path(), "b", "serverless-two");
  FilesystemRegistryClient client(src.path());
  VirtualClock clock;
  FetchSpec spec;
  spec.query = "serverless";
  client.fail_next(ErrorKind::kNetwork, 0);
  // Fail the fourth request (second component's metadata).
  struct Flaky : RegistryClient {
    FilesystemRegistryClient& inner;
    int calls = 0;
    explicit Flaky(FilesystemRegistryClient& c) : inner(c) {}
    std::vector<RemoteComponent> list(const FetchSpec& s) override { return inner.list(s); }
    std::map<std::string, std::string> get_metadata(const FetchSpec& s,
                                                    const std::string& id) override {
      if (++calls == 2) throw Error(ErrorKind::kNetwork, "connection reset");
      return inner.get_metadata(s, id);
    }
    void download(const FetchSpec& s, const std::string& id, const fs::path& d) override {
      inner.download(s, id, d);
    }
  } flaky(client);
  EXPECT_THROW(fetch_components(spec, flaky, dst.path(), clock), Error);
  EXPECT_TRUE(fs::is_empty(dst.path()));
}
