// SPDX-License-Identifier: Apache-2.0
//
// diffsense: analyze binary update diffs for injected malicious functions.
//
// Exit codes: 0 benign, 2 malicious, 3 undecided, 1 on any error.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>

#include "diffsense/callgraph.hpp"
#include "diffsense/config.hpp"
#include "diffsense/corpus.hpp"
#include "diffsense/fss.hpp"
#include "diffsense/ingest.hpp"
#include "diffsense/io.hpp"
#include "diffsense/pipeline.hpp"

namespace fs = std::filesystem;
using namespace diffsense;

namespace {

struct Overrides {
  std::optional<std::size_t> k;
  std::optional<bool> changelog;
  std::optional<std::size_t> concurrency;
  std::optional<std::size_t> code_budget;
  std::vector<std::size_t> k_values;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("-k,--top-k", o.k, "Functions shown to the predictor");
  cmd->add_flag("--changelog,!--no-changelog", o.changelog, "Include the release changelog");
  cmd->add_option("--concurrency", o.concurrency, "Summarizer worker bound");
  cmd->add_option("--code-budget", o.code_budget, "Decompiled code characters per prompt");
}

AppConfig resolve_config(const fs::path& path, const Overrides& o) {
  if (!fs::exists(path)) throw ConfigError(path.string() + ": config file not found");
  AppConfig cfg = load_config(path);
  if (o.k) cfg.predict.k = *o.k;
  if (o.changelog) cfg.predict.include_changelog = *o.changelog;
  if (o.concurrency) cfg.concurrency = *o.concurrency;
  if (o.code_budget) cfg.limits.code_chars = *o.code_budget;
  if (!o.k_values.empty()) cfg.eval_k = o.k_values;
  cfg.validate();
  return cfg;
}

struct Backends {
  std::unique_ptr<ChatBackend> summarizer;
  std::unique_ptr<ChatBackend> predictor;
};

Backends make_backends(const AppConfig& cfg) {
  Backends b;
  b.summarizer = make_backend(cfg.backend);
  b.predictor = make_backend(cfg.prediction_backend());
  return b;
}

int cmd_analyze(const fs::path& artifact_path, const fs::path& config_path, const fs::path& run_dir,
                const Overrides& o, bool lenient) {
  AppConfig cfg = resolve_config(config_path, o);
  auto parsed = ingest::load_artifact(artifact_path, lenient ? ParseMode::Lenient : ParseMode::Strict);
  Backends b = make_backends(cfg);
  auto result = pipeline::analyze(parsed, *b.summarizer, *b.predictor, cfg, run_dir);

  const auto& r = result.report;
  std::printf("%s %s -> %s: %s\n", r["project"].get<std::string>().c_str(),
              r["old_version"].get<std::string>().c_str(),
              r["new_version"].get<std::string>().c_str(), r["verdict"].get<std::string>().c_str());
  std::size_t shown = 0;
  for (const auto& f : r["functions"]) {
    if (shown++ == 5) break;
    std::printf("  %5s  %-40s %s\n", f["score"].get<std::string>().c_str(),
                f["name"].get<std::string>().c_str(), f["vector"].get<std::string>().c_str());
  }
  if (!result.summary.failures.empty())
    std::printf("  %zu function(s) failed; see report.md\n", result.summary.failures.size());
  std::printf("run directory: %s\n", run_dir.string().c_str());
  return pipeline::exit_code(result.verdict.verdict);
}

int cmd_evaluate(const fs::path& manifest, const fs::path& config_path, const fs::path& out,
                 const Overrides& o) {
  AppConfig cfg = resolve_config(config_path, o);
  Backends b = make_backends(cfg);
  auto result = pipeline::evaluate(manifest, *b.summarizer, *b.predictor, cfg, out);
  write_text_file(out / "evaluation.json", result.report.dump(2) + "\n");
  write_text_file(out / "evaluation.md", result.markdown);
  std::cout << result.markdown;
  return 0;
}

int cmd_score(const std::string& vector) {
  auto cls = fss::parse_vector(vector);
  auto s = fss::score(cls);
  std::printf("vector: %s\nS: %.6f\nM: %.6f\nFSS: %s\n", fss::format_vector(cls).c_str(),
              s.sensitivity, s.impact, s.to_string().c_str());
  return 0;
}

int cmd_gen_corpus(const corpus::CorpusSpec& spec, const fs::path& out) {
  auto rows = corpus::write_corpus(spec, out);
  std::size_t mal = 0;
  for (const auto& r : rows) mal += r.label == Label::Malicious;
  std::printf("wrote %zu diffs (%zu malicious) and manifest.json to %s\n", rows.size(), mal,
              out.string().c_str());
  return 0;
}

int cmd_graph_dump(const fs::path& artifact_path, bool raw, const std::optional<fs::path>& out) {
  auto a = ingest::load_artifact(artifact_path);
  if (!raw) a = ingest::canonicalize_names(std::move(a));
  auto dot = to_dot(build_diff_callgraph(a), &a);
  if (out) write_text_file(*out, dot);
  else std::cout << dot;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Detect injected malicious functions in binary update diffs"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "diffsense 0.1.0");

  Overrides overrides;
  fs::path artifact, config, run_dir = "run", manifest, out;
  bool lenient = false;

  auto* analyze = app.add_subcommand("analyze", "Summarize, score and judge one diff artifact");
  analyze->add_option("artifact", artifact, "Diff artifact (JSON)")->required();
  analyze->add_option("-c,--config", config, "Config file")->required();
  analyze->add_option("-o,--run-dir", run_dir, "Output directory")->capture_default_str();
  analyze->add_flag("--lenient", lenient, "Accept unknown artifact fields with a warning");
  add_overrides(analyze, overrides);

  auto* evaluate = app.add_subcommand("evaluate", "Measure detection and FSS separation on a corpus");
  evaluate->add_option("manifest", manifest, "Corpus manifest.json")->required();
  evaluate->add_option("-c,--config", config, "Config file")->required();
  evaluate->add_option("-o,--out", out, "Output directory")->required();
  evaluate->add_option("--k-values", overrides.k_values, "Replace evaluate.k_values")->delimiter(',');
  add_overrides(evaluate, overrides);

  std::string vector;
  auto* score = app.add_subcommand("score", "Compute the FSS of a vector such as B:M/C:L");
  score->add_option("vector", vector, "FSS vector")->required();

  corpus::CorpusSpec spec;
  auto* gen = app.add_subcommand("gen-corpus", "Write a synthetic labeled corpus");
  gen->add_option("-o,--out", out, "Output directory")->required();
  gen->add_option("--seed", spec.seed)->capture_default_str();
  gen->add_option("--projects", spec.projects)->capture_default_str()->check(CLI::PositiveNumber);
  gen->add_option("--versions", spec.versions)->capture_default_str()->check(CLI::PositiveNumber);
  gen->add_option("--inject-rate", spec.inject_rate)->capture_default_str()->check(CLI::Range(0.0, 1.0));

  bool raw = false;
  std::optional<fs::path> dot_out;
  auto* graph = app.add_subcommand("graph-dump", "Print the diff callgraph in DOT format");
  graph->add_option("artifact", artifact, "Diff artifact (JSON)")->required();
  graph->add_flag("--raw", raw, "Keep original function names");
  graph->add_option("-o,--out", dot_out, "Write to a file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    std::cerr << sub->help();
    return 1;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(artifact, config, run_dir, overrides, lenient);
    if (evaluate->parsed()) return cmd_evaluate(manifest, config, out, overrides);
    if (score->parsed()) return cmd_score(vector);
    if (gen->parsed()) return cmd_gen_corpus(spec, out);
    if (graph->parsed()) return cmd_graph_dump(artifact, raw, dot_out);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n\n";
    auto* sub = app.get_subcommands().front();
    std::cerr << sub->help();
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
