// SPDX-License-Identifier: Apache-2.0

#include "diffsense/pipeline.hpp"

#include <chrono>
#include <ctime>

#include "diffsense/corpus.hpp"
#include "diffsense/ingest.hpp"
#include "diffsense/io.hpp"

namespace diffsense::pipeline {

namespace {

using report::Json;

std::string utc_timestamp() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json backend_json(const BackendSettings& s) {
  Json j;
  if (s.kind == BackendKind::Mock) {
    j["kind"] = "mock";
    if (s.mock.mode == MockVerdictPolicy::Mode::Fixed) j["verdict_reply"] = s.mock.fixed_reply;
    else j["verdict_threshold"] = s.mock.threshold;
    return j;
  }
  j["kind"] = "http";
  j["base_url"] = s.http.base_url;
  j["model"] = s.http.model;
  j["temperature"] = s.http.temperature;
  j["top_p"] = s.http.top_p;
  j["reasoning_effort"] =
      s.http.reasoning_effort ? Json(to_string(*s.http.reasoning_effort)) : Json();
  j["max_retries"] = s.http.max_retries;
  j["timeout_ms"] = s.http.timeout.count();
  return j;
}

summarizer::SummarizerConfig summarizer_config(const AppConfig& config,
                                               std::optional<std::filesystem::path> run_dir) {
  summarizer::SummarizerConfig sc;
  sc.concurrency = config.concurrency;
  sc.limits = config.limits;
  sc.run_dir = std::move(run_dir);
  return sc;
}

}  // namespace

Json config_json(const AppConfig& config) {
  Json j;
  j["backend"] = backend_json(config.backend);
  j["predict_backend"] = config.predict_backend ? backend_json(*config.predict_backend) : Json();
  j["predictor"] = {{"k", config.predict.k}, {"changelog", config.predict.include_changelog}};
  j["summarizer"] = {{"concurrency", config.concurrency},
                     {"code_budget", config.limits.code_chars},
                     {"diff_budget", config.limits.diff_chars}};
  j["evaluate"] = {{"k_values", config.eval_k}, {"changelog_modes", config.eval_changelog}};
  return j;
}

int exit_code(VerdictKind verdict) {
  switch (verdict) {
    case VerdictKind::Benign: return 0;
    case VerdictKind::Malicious: return 2;
    case VerdictKind::Unknown: return 3;
  }
  return 3;
}

AnalyzeResult analyze(const DiffArtifact& artifact, ChatBackend& summarizer_backend,
                      ChatBackend& predictor_backend, const AppConfig& config,
                      const std::optional<std::filesystem::path>& run_dir) {
  config.validate();
  AnalyzeResult out;
  out.prepared = ingest::prepare(artifact);
  out.schedule = schedule(build_diff_callgraph(out.prepared));
  out.summary = summarizer::run_summarization(out.prepared, out.schedule, summarizer_backend,
                                              summarizer_config(config, run_dir));
  out.verdict =
      predictor::predict(predictor_backend, out.prepared, out.summary.analyses, config.predict);
  out.report = report::analysis_report({out.prepared, out.summary, out.verdict, config.predict,
                                        summarizer_backend.model_id(),
                                        predictor_backend.model_id()});
  if (run_dir) {
    write_text_file(*run_dir / "report.json", out.report.dump(2) + "\n");
    write_text_file(*run_dir / "report.md", report::analysis_markdown(out.report));
    write_text_file(*run_dir / "verdict.json", codec::to_json(out.verdict).dump(2) + "\n");
    Json run;
    run["created_at"] = utc_timestamp();
    run["config"] = config_json(config);
    run["summarizer_model"] = summarizer_backend.model_id();
    run["predictor_model"] = predictor_backend.model_id();
    run["backend_calls"] = out.summary.backend_calls;
    run["cache_hits"] = out.summary.cache_hits;
    run["usage"] = {{"summarization", codec::to_json(out.summary.usage)},
                    {"summarization_fresh", codec::to_json(out.summary.fresh_usage)},
                    {"prediction", codec::to_json(out.verdict.usage)}};
    write_text_file(*run_dir / "run.json", run.dump(2) + "\n");
  }
  return out;
}

EvaluateResult evaluate(const std::filesystem::path& manifest_path, ChatBackend& summarizer_backend,
                        ChatBackend& predictor_backend, const AppConfig& config,
                        const std::optional<std::filesystem::path>& work_dir) {
  config.validate();
  auto rows = corpus::read_manifest(manifest_path);
  auto base = manifest_path.parent_path();

  struct Prepared {
    DiffArtifact artifact;
    std::map<std::string, FunctionAnalysis> analyses;
  };
  std::vector<Prepared> prepared;
  report::EvalInputs in;
  in.summarizer_model = summarizer_backend.model_id();
  in.predictor_model = predictor_backend.model_id();
  std::vector<evaluator::DiffFunctionScores> scores;
  bool any_function_labels = false;

  for (const auto& row : rows) {
    DiffArtifact a = ingest::prepare(ingest::load_artifact(base / row.path));
    if (row.label && a.label && *row.label != *a.label) {
      throw SchemaError((base / row.path).string() + ": manifest label disagrees with artifact");
    }
    std::optional<std::filesystem::path> run_dir;
    if (work_dir) run_dir = *work_dir / "runs" / safe_file_stem(row.id);
    auto sched = schedule(build_diff_callgraph(a));
    auto result = summarizer::run_summarization(a, sched, summarizer_backend,
                                                summarizer_config(config, run_dir));

    report::EvalDiff d;
    d.id = row.id;
    d.program = a.new_binary.name;
    d.label = row.label ? row.label : a.label;
    d.functions = a.functions.size();
    d.failures = result.failures;
    d.usage = result.usage;
    in.diffs.push_back(std::move(d));

    if (a.function_labels && !a.function_labels->empty()) any_function_labels = true;
    scores.push_back(evaluator::collect_scores(row.id, a, result.analyses));
    prepared.push_back({std::move(a), std::move(result.analyses)});
  }

  for (auto k : config.eval_k) {
    for (bool changelog : config.eval_changelog) {
      report::EvalConfiguration c;
      c.predict.k = k;
      c.predict.include_changelog = changelog;
      for (const auto& p : prepared) {
        c.verdicts.push_back(predictor::predict(predictor_backend, p.artifact, p.analyses, c.predict));
      }
      in.configurations.push_back(std::move(c));
    }
  }

  if (any_function_labels) in.separation = evaluator::fss_separation(scores);

  EvaluateResult out;
  out.report = report::evaluation_report(in);
  out.markdown = report::evaluation_markdown(out.report);
  return out;
}

}  // namespace diffsense::pipeline
