// SPDX-License-Identifier: Apache-2.0
//
// End-to-end runs: one diff (analyze) or a labeled corpus (evaluate).

#pragma once

#include <filesystem>
#include <optional>

#include "diffsense/callgraph.hpp"
#include "diffsense/config.hpp"
#include "diffsense/report.hpp"

namespace diffsense::pipeline {

struct AnalyzeResult {
  DiffArtifact prepared;
  Schedule schedule;
  summarizer::SummarizationResult summary;
  DiffVerdict verdict;
  report::Json report;
};

/// canonicalize -> text diffs -> callgraph -> schedule -> summarize ->
/// predict. With `run_dir` set, writes analyses/, prompts/, report.json,
/// report.md, verdict.json and run.json there. Only run.json carries a
/// timestamp.
AnalyzeResult analyze(const DiffArtifact& artifact, ChatBackend& summarizer_backend,
                      ChatBackend& predictor_backend, const AppConfig& config,
                      const std::optional<std::filesystem::path>& run_dir = std::nullopt);

/// 0 for Benign, 2 for Malicious, 3 for Unknown.
int exit_code(VerdictKind verdict);

struct EvaluateResult {
  report::Json report;
  std::string markdown;
};

/// Summarizes every manifest entry once, then predicts each diff under every
/// (k, changelog) combination of the config. With `work_dir` set, per-diff
/// run caches live under `<work_dir>/runs/<id>/`.
EvaluateResult evaluate(const std::filesystem::path& manifest_path, ChatBackend& summarizer_backend,
                        ChatBackend& predictor_backend, const AppConfig& config,
                        const std::optional<std::filesystem::path>& work_dir = std::nullopt);

report::Json config_json(const AppConfig& config);

}  // namespace diffsense::pipeline
