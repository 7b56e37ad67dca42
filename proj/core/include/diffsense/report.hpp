// SPDX-License-Identifier: Apache-2.0
//
// Machine- and human-readable reports. Markdown is always rendered from the
// JSON document, so both carry the same numbers.

#pragma once

#include <string>
#include <vector>

#include "diffsense/codec.hpp"
#include "diffsense/evaluator.hpp"
#include "diffsense/predictor.hpp"
#include "diffsense/summarizer.hpp"

namespace diffsense::report {

using codec::Json;

inline constexpr int kReportVersion = 1;

struct AnalysisInputs {
  const DiffArtifact& artifact;
  const summarizer::SummarizationResult& summary;
  const DiffVerdict& verdict;
  const predictor::PredictConfig& predict;
  std::string summarizer_model;
  std::string predictor_model;
};

/// Functions sorted by FSS descending, then by name.
Json analysis_report(const AnalysisInputs& in);
std::string analysis_markdown(const Json& report);

struct EvalDiff {
  std::string id;
  std::string program;
  std::optional<Label> label;
  std::size_t functions = 0;
  std::vector<summarizer::FunctionFailure> failures;
  TokenUsage usage;
};

struct EvalConfiguration {
  predictor::PredictConfig predict;
  std::vector<DiffVerdict> verdicts;  // parallel to EvalInputs::diffs
};

struct EvalInputs {
  std::vector<EvalDiff> diffs;
  std::vector<EvalConfiguration> configurations;
  /// Absent when the corpus has no function labels.
  std::optional<evaluator::SeparationStats> separation;
  std::string summarizer_model;
  std::string predictor_model;
};

/// Throws Error when a diff lacks its ground-truth label.
Json evaluation_report(const EvalInputs& in);
std::string evaluation_markdown(const Json& report);

/// Name used for a configuration column, e.g. "k=5, changelog".
std::string configuration_name(const predictor::PredictConfig& config);

/// Three-decimal rounding applied to every real in evaluation reports.
double round3(double value);

}  // namespace diffsense::report
