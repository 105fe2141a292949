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

// slsa-audit: command-line front end over the slsa_audit library.
//
// Exit codes: 0 clean, 1 findings at or above --fail-on, 2 operational error.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <iterator>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "slsa_audit/archive.hpp"
#include "slsa_audit/dockerlint.hpp"
#include "slsa_audit/error.hpp"
#include "slsa_audit/iaclint.hpp"
#include "slsa_audit/ingest.hpp"
#include "slsa_audit/pipeline.hpp"
#include "slsa_audit/report.hpp"
#include "slsa_audit/typosquat.hpp"
#include "slsa_audit/util.hpp"
#include "slsa_audit/vulnscan.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace slsa;

constexpr int kExitError = 2;

struct GlobalOptions {
  std::string output = "table";
  std::string fail_on;
  std::string config;
};

struct Context {
  report::OutputFormat format = report::OutputFormat::kTable;
  std::optional<Severity> fail_on;
  pipeline::AuditConfig config;
};

void print_notices(const std::vector<std::string>& notices) {
  for (const auto& n : notices) std::cerr << "notice: " << n << "\n";
}

// Prints the report, plus `extra` under `extra_key` in JSON mode or the
// `extra_table` text after the report in table mode.
int finish(const Context& ctx, const ScanReport& rep, const std::string& extra_key = "",
           const json& extra = nullptr, const std::string& extra_table = "") {
  if (ctx.format == report::OutputFormat::kJson && !extra_key.empty()) {
    std::cout << json{{"report", report::to_json(rep)}, {extra_key, extra}}.dump(2) << "\n";
  } else {
    std::cout << report::emit(rep, ctx.format);
    if (ctx.format == report::OutputFormat::kTable && !extra_table.empty()) {
      std::cout << "\n" << extra_table;
    }
  }
  return report::exit_code_for(rep, ctx.fail_on);
}

ScanReport single_batch(const std::string& corpus_id, std::vector<Finding> findings,
                        const std::map<ComponentRef, std::uint64_t>& counts = {}) {
  const report::FindingBatch batch{corpus_id, std::move(findings)};
  return report::aggregate(corpus_id, std::span(&batch, 1), counts);
}

std::vector<ingest::CorpusEntry> load_entries(const fs::path& root, const Context& ctx) {
  auto load = ingest::load_corpus(root);
  for (const auto& e : load.errors) {
    std::cerr << "notice: " << e.path.generic_string() << ":" << e.line << ": " << e.message
              << "\n";
  }
  std::vector<ingest::CorpusEntry> out;
  for (auto& e : load.entries) {
    if (!ctx.config.serverless_only || ingest::is_serverless(e)) out.push_back(std::move(e));
  }
  return out;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// ---------------------------------------------------------------------------

int cmd_ingest(const Context& ctx, const fs::path& root, bool filter) {
  auto load = ingest::load_corpus(root);
  for (const auto& e : load.errors) {
    std::cerr << "notice: " << e.path.generic_string() << ":" << e.line << ": " << e.message
              << "\n";
  }
  json rows = json::array();
  std::string text = pad("Component", 48) + pad("Kind", 14) + "Serverless\n";
  for (const auto& e : load.entries) {
    const bool serverless = ingest::is_serverless(e);
    if ((filter || ctx.config.serverless_only) && !serverless) continue;
    rows.push_back({{"component", report::to_json(e.ref)},
                    {"artifact_kind", std::string(ingest::to_string(e.artifact_kind))},
                    {"serverless", serverless},
                    {"path", e.root_path.filename().generic_string()}});
    text += pad(e.ref.display(), 48) + pad(std::string(ingest::to_string(e.artifact_kind)), 14) +
            (serverless ? "yes" : "no") + "\n";
  }
  if (ctx.format == report::OutputFormat::kTable) {
    std::cout << text;
  } else {
    std::cout << json{{"components", rows}}.dump(2) << "\n";
  }
  return 0;
}

int cmd_vulnscan(Context& ctx, const fs::path& corpus, const std::string& db_dir, bool fp_filter,
                 const std::vector<std::string>& compare, const std::string& compare_format) {
  if (!db_dir.empty()) ctx.config.advisory_dir = db_dir;
  if (fp_filter) ctx.config.fp_filter = true;
  std::vector<vulnscan::Advisory> advisories;
  if (ctx.config.advisory_dir) {
    advisories = vulnscan::load_advisory_db(*ctx.config.advisory_dir);
  } else {
    std::cerr << "notice: no advisory database given (--db); nothing can match\n";
  }
  const vulnscan::AdvisoryIndex db(std::move(advisories));
  std::vector<Finding> findings;
  std::map<ComponentRef, std::uint64_t> counts;
  for (const auto& e : load_entries(corpus, ctx)) {
    std::uint64_t n = 0;
    auto out = pipeline::run_vulnscan(e, db, ctx.config, &n);
    counts[e.ref] = n;
    for (auto& note : out.notices) note = e.ref.display() + ": " + note;
    print_notices(out.notices);
    findings.insert(findings.end(), out.findings.begin(), out.findings.end());
  }
  const auto rep = single_batch(pipeline::corpus_id_of(corpus), std::move(findings), counts);
  if (compare.empty()) return finish(ctx, rep);

  const auto format = vulnscan::parse_external_format(compare_format);
  const auto a = vulnscan::import_external_scan_file(compare[0], format);
  const auto b = vulnscan::import_external_scan_file(compare[1], format);
  std::set<std::string> names;
  for (const auto& [k, v] : a) names.insert(k);
  for (const auto& [k, v] : b) names.insert(k);
  json rows = json::array();
  std::string text = pad("Component", 40) + pad("A", 6) + pad("B", 6) + "Jaccard\n";
  static const std::set<std::string> kNone;
  for (const auto& name : names) {
    const auto ia = a.find(name);
    const auto ib = b.find(name);
    const auto& sa = ia == a.end() ? kNone : ia->second;
    const auto& sb = ib == b.end() ? kNone : ib->second;
    const double j = vulnscan::jaccard_similarity(sa, sb);
    rows.push_back({{"component", name}, {"a", sa.size()}, {"b", sb.size()}, {"jaccard", j}});
    text += pad(name, 40) + pad(std::to_string(sa.size()), 6) + pad(std::to_string(sb.size()), 6) +
            fixed(j) + "\n";
  }
  return finish(ctx, rep, "comparison", rows, text);
}

int cmd_archive_scan(Context& ctx, const fs::path& file, std::optional<int> depth,
                     std::optional<int> threshold) {
  if (depth) ctx.config.recursion_depth = *depth;
  if (threshold) ctx.config.consensus_threshold = *threshold;
  std::vector<std::string> notices;
  const auto sigs = pipeline::load_signatures(ctx.config, &notices);
  print_notices(notices);
  const auto scan = archive::scan_archive_file(file, sigs, ctx.config.recursion_depth,
                                               ctx.config.limits);
  ComponentRef ref;
  ref.publisher = "local";
  ref.name = file.filename().string();
  auto out = pipeline::archive_findings(scan, sigs, ctx.config.consensus_threshold, ref,
                                        file.filename().string());
  print_notices(out.notices);
  return finish(ctx, single_batch(file.filename().string(), std::move(out.findings)));
}

int cmd_archive_inject(const fs::path& tree, const fs::path& payload, const std::string& format,
                       const fs::path& out, const std::string& inside, bool testing) {
  if (!testing) {
    std::cerr << "error: archive inject builds test payload archives; pass --i-am-testing\n";
    return kExitError;
  }
  const auto bytes = archive::inject_and_pack(tree, payload, archive::parse_format(format), inside);
  write_binary_file(out, bytes);
  std::cerr << "wrote " << out.generic_string() << " (" << bytes.size() << " bytes)\n";
  return 0;
}

int cmd_docker(Context& ctx, const std::string& corpus, const std::string& command,
               const std::string& rules_file) {
  if (!rules_file.empty()) ctx.config.docker = docker::load_rules(rules_file);
  if (!corpus.empty()) {
    std::vector<Finding> findings;
    for (const auto& e : load_entries(corpus, ctx)) {
      auto out = pipeline::run_docker(e, ctx.config);
      for (auto& note : out.notices) note = e.ref.display() + ": " + note;
      print_notices(out.notices);
      findings.insert(findings.end(), out.findings.begin(), out.findings.end());
    }
    return finish(ctx, single_batch(pipeline::corpus_id_of(corpus), std::move(findings)));
  }
  std::string text = command;
  std::string label = "cmd";
  if (text.empty()) {
    text.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
    label = "stdin";
  }
  ComponentRef ref;
  ref.publisher = "local";
  ref.name = label;
  auto lint = docker::lint_text(text, ctx.config.docker, ref, label);
  print_notices(lint.notices);
  return finish(ctx, single_batch(label, std::move(lint.findings)));
}

json histogram_json(const iac::SeverityHistogram& h) {
  auto row = [](const std::map<Severity, std::uint64_t>& m) {
    json j = json::object();
    for (const auto& [s, n] : m) j[std::string(to_string(s))] = n;
    return j;
  };
  json per = json::object();
  for (const auto& [fw, m] : h.per_framework) per[std::string(iac::to_string(fw))] = row(m);
  return {{"total", row(h.total)}, {"per_framework", per}};
}

std::string histogram_table(const iac::SeverityHistogram& h,
                            std::span<const iac::RuleShare> shares) {
  std::string out = pad("Framework", 16);
  for (auto s : kAllSeverities) out += pad(std::string(to_string(s)), 10);
  out += "\n";
  auto row = [&](const std::string& label, const std::map<Severity, std::uint64_t>& m) {
    out += pad(label, 16);
    for (auto s : kAllSeverities) {
      const auto it = m.find(s);
      out += pad(std::to_string(it == m.end() ? 0 : it->second), 10);
    }
    out += "\n";
  };
  for (const auto& [fw, m] : h.per_framework) row(std::string(iac::to_string(fw)), m);
  row("total", h.total);
  if (!shares.empty()) {
    out += "\n" + pad("Rule", 28) + pad("Findings", 10) + pad("Templates", 11) +
           pad("%Findings", 11) + "%Templates\n";
    for (const auto& r : shares) {
      out += pad(r.rule_id, 28) + pad(std::to_string(r.findings), 10) +
             pad(std::to_string(r.templates), 11) + pad(fixed(100 * r.share_of_findings, 2), 11) +
             fixed(100 * r.share_of_templates, 2) + "\n";
    }
  }
  return out;
}

int cmd_iac(Context& ctx, const std::string& corpus, const std::string& catalog_file,
            bool histogram, const std::vector<std::string>& paths) {
  if (!catalog_file.empty()) ctx.config.iac = iac::load_catalog(catalog_file);
  std::vector<iac::TemplateResult> results;
  std::string corpus_id = "templates";
  auto collect = [&](std::vector<iac::TemplateResult> batch, const std::string& who) {
    for (auto& r : batch) {
      std::vector<std::string> notes = r.notices;
      if (r.error) notes.push_back(*r.error);
      for (auto& n : notes) n = who + n;
      print_notices(notes);
      results.push_back(std::move(r));
    }
  };
  if (!corpus.empty()) {
    corpus_id = pipeline::corpus_id_of(corpus);
    for (const auto& e : load_entries(corpus, ctx)) {
      collect(iac::lint_directory(e.iac_dir(), ctx.config.iac, e.ref), e.ref.display() + ": ");
    }
  }
  ComponentRef local;
  local.publisher = "local";
  local.name = "templates";
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      collect(iac::lint_directory(p, ctx.config.iac, local, ""), "");
    } else {
      collect({iac::lint_template(p, read_text_file(p), ctx.config.iac, local)}, "");
    }
  }
  std::vector<Finding> findings;
  for (const auto& r : results) findings.insert(findings.end(), r.findings.begin(), r.findings.end());
  const auto rep = single_batch(corpus_id, std::move(findings));
  if (!histogram) return finish(ctx, rep);
  const auto h = iac::severity_histogram(results);
  const auto shares = iac::rule_shares(results);
  json share_rows = json::array();
  for (const auto& r : shares) {
    share_rows.push_back({{"rule_id", r.rule_id},
                          {"findings", r.findings},
                          {"templates", r.templates},
                          {"share_of_findings", r.share_of_findings},
                          {"share_of_templates", r.share_of_templates}});
  }
  json extra = histogram_json(h);
  extra["templates"] = results.size();
  extra["rule_shares"] = share_rows;
  return finish(ctx, rep, "histogram", extra, histogram_table(h, shares));
}

int cmd_typosquat(Context& ctx, const fs::path& corpus, std::optional<std::size_t> max_distance,
                  const std::string& kind) {
  if (max_distance) ctx.config.max_distance = *max_distance;
  const auto entries = load_entries(corpus, ctx);
  std::vector<ComponentRef> refs;
  for (const auto& e : entries) refs.push_back(e.ref);
  auto records = typo::records_from_components(refs, ctx.config.names);
  if (!kind.empty()) {
    const auto k = typo::parse_name_kind(kind);
    std::erase_if(records, [k](const typo::NameRecord& r) { return r.kind != k; });
  }
  const auto result = typo::find_near_pairs(records, ctx.config.max_distance);
  auto out = pipeline::typosquat_findings(result);
  const auto rep = single_batch(pipeline::corpus_id_of(corpus), std::move(out.findings));

  json pairs = json::array();
  std::string text = pad("Kind", 10) + pad("Name A", 28) + pad("Name B", 28) + "Distance\n";
  for (const auto* list : {&result.collisions, &result.pairs}) {
    for (const auto& p : *list) {
      pairs.push_back({{"kind", std::string(typo::to_string(p.a.kind))},
                       {"a", p.a.name},
                       {"a_owner", p.a.owner.display()},
                       {"b", p.b.name},
                       {"b_owner", p.b.owner.display()},
                       {"distance", p.distance}});
      text += pad(std::string(typo::to_string(p.a.kind)), 10) + pad(p.a.name, 28) +
              pad(p.b.name, 28) + std::to_string(p.distance) + "\n";
    }
  }
  json cdf = json::array();
  if (records.size() >= 2) {
    text += "\n" + pad("Distance", 10) + "Cumulative fraction\n";
    const auto points = typo::distance_cdf(records, ctx.config.max_distance);
    for (std::size_t d = 0; d < points.size(); ++d) {
      cdf.push_back({{"distance", d}, {"fraction", points[d]}});
      text += pad(std::to_string(d), 10) + fixed(points[d], 6) + "\n";
    }
  }
  return finish(ctx, rep, "near_pairs", json{{"pairs", pairs}, {"cdf", cdf}}, text);
}

int cmd_scan_all(const Context& ctx, const fs::path& corpus, bool timestamps) {
  const auto run = pipeline::scan_all(corpus, ctx.config, timestamps);
  std::cout << report::emit_run(run, ctx.format);
  if (ctx.format != report::OutputFormat::kTable) print_notices(run.notices);
  return report::exit_code_for(run.report, ctx.fail_on);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Static audit of serverless components: vulnerable dependencies, archive "
               "payloads, docker run parameters, IaC misconfigurations and typo-squatting."};
  app.name("slsa-audit");
  app.set_version_flag("--version", std::string(pipeline::kToolVersion));
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--output", g.output, "json, table or sarif-like")
      ->check(CLI::IsMember({"json", "table", "sarif-like", "sarif"}))
      ->capture_default_str();
  app.add_option("--fail-on", g.fail_on, "exit 1 when a finding is at or above this severity");
  app.add_option("--config", g.config,
                 std::string("JSON config file (fallback: $") + pipeline::kConfigEnvVar + ")");

  std::function<int(Context&)> action;

  auto* ingest = app.add_subcommand("ingest", "list corpus components");
  std::string ingest_root;
  bool filter_serverless = false;
  ingest->add_option("--root", ingest_root, "corpus root")->required();
  ingest->add_flag("--filter-serverless", filter_serverless, "only serverless components");
  ingest->callback([&] {
    action = [&](Context& c) { return cmd_ingest(c, ingest_root, filter_serverless); };
  });

  auto* vuln = app.add_subcommand("vulnscan", "match dependencies against advisories (V1)");
  std::string vuln_corpus, vuln_db, compare_format = "trivy";
  bool fp_filter = false;
  std::vector<std::string> compare;
  vuln->add_option("--corpus", vuln_corpus, "corpus root")->required();
  vuln->add_option("--db", vuln_db, "advisory directory (OSV JSON)");
  vuln->add_flag("--fp-filter", fp_filter, "drop matches seen only in metadata files");
  vuln->add_option("--compare", compare, "two external scan reports to compare")
      ->expected(2);
  vuln->add_option("--compare-format", compare_format, "trivy or grype")->capture_default_str();
  vuln->callback([&] {
    action = [&](Context& c) {
      return cmd_vulnscan(c, vuln_corpus, vuln_db, fp_filter, compare, compare_format);
    };
  });

  auto* arch = app.add_subcommand("archive", "compressed component inspection (V2)");
  arch->require_subcommand(1);
  auto* scan = arch->add_subcommand("scan", "scan an archive for payload signatures");
  std::string scan_file;
  std::optional<int> depth, threshold;
  scan->add_option("file", scan_file)->required()->check(CLI::ExistingFile);
  scan->add_option("--depth", depth, "nested archive depth");
  scan->add_option("--threshold", threshold, "engines needed for a malicious verdict");
  scan->callback([&] {
    action = [&](Context& c) { return cmd_archive_scan(c, scan_file, depth, threshold); };
  });
  auto* inject = arch->add_subcommand("inject", "pack a tree with a payload (test harness)");
  std::string inj_tree, inj_payload, inj_format, inj_out, inj_dir;
  bool testing = false;
  inject->add_option("tree", inj_tree)->required()->check(CLI::ExistingDirectory);
  inject->add_option("payload", inj_payload)->required()->check(CLI::ExistingFile);
  inject->add_option("--format", inj_format, archive::supported_formats_list())->required();
  inject->add_option("-o,--out", inj_out, "output archive")->required();
  inject->add_option("--into", inj_dir, "directory inside the archive for the payload");
  inject->add_flag("--i-am-testing", testing, "confirm this is a test harness run");
  inject->callback([&] {
    action = [&](Context&) {
      return cmd_archive_inject(inj_tree, inj_payload, inj_format, inj_out, inj_dir, testing);
    };
  });

  auto* dock = app.add_subcommand("docker", "lint docker run commands (V3)");
  std::string dock_corpus, dock_cmd, dock_rules;
  auto* dc = dock->add_option("--corpus", dock_corpus, "corpus root");
  dock->add_option("--cmd", dock_cmd, "a single command; stdin when neither is given")
      ->excludes(dc);
  dock->add_option("--rules", dock_rules, "JSON rules file");
  dock->callback([&] {
    action = [&](Context& c) { return cmd_docker(c, dock_corpus, dock_cmd, dock_rules); };
  });

  auto* iacc = app.add_subcommand("iac", "IaC template misconfigurations (V4)");
  std::string iac_corpus, iac_catalog;
  bool histogram = false;
  std::vector<std::string> iac_paths;
  iacc->add_option("--corpus", iac_corpus, "corpus root");
  iacc->add_option("--catalog", iac_catalog, "JSON rule catalog");
  iacc->add_flag("--histogram", histogram, "severity histogram and rule shares");
  iacc->add_option("paths", iac_paths, "template files or directories");
  iacc->callback([&] {
    if (iac_corpus.empty() && iac_paths.empty()) {
      throw CLI::ValidationError("iac", "give --corpus or template paths");
    }
    action = [&](Context& c) { return cmd_iac(c, iac_corpus, iac_catalog, histogram, iac_paths); };
  });

  auto* typo_cmd = app.add_subcommand("typosquat", "near-identical names (V5)");
  std::string typo_corpus, typo_kind;
  std::optional<std::size_t> max_distance;
  typo_cmd->add_option("--corpus", typo_corpus, "corpus root")->required();
  typo_cmd->add_option("--max-distance", max_distance, "largest edit distance reported");
  typo_cmd->add_option("--kind", typo_kind, "username or image");
  typo_cmd->callback([&] {
    action = [&](Context& c) { return cmd_typosquat(c, typo_corpus, max_distance, typo_kind); };
  });

  auto* all = app.add_subcommand("scan-all", "every enabled vector over a corpus");
  std::string all_corpus;
  bool timestamps = false;
  all->add_option("--corpus", all_corpus, "corpus root")->required();
  all->add_flag("--timestamps", timestamps, "record start and finish times in the run header");
  all->callback([&] {
    action = [&](Context& c) { return cmd_scan_all(c, all_corpus, timestamps); };
  });

  // Global flags may follow the subcommand.
  for (auto* sub : {ingest, vuln, arch, scan, inject, dock, iacc, typo_cmd, all}) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitError;
  }

  try {
    Context ctx;
    ctx.format = report::parse_output_format(g.output);
    if (!g.fail_on.empty()) ctx.fail_on = parse_severity(g.fail_on);
    ctx.config = pipeline::resolve_config(g.config.empty() ? std::nullopt
                                                           : std::optional<fs::path>(g.config));
    return action(ctx);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return kExitError;
}
