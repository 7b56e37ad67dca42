// SPDX-License-Identifier: Apache-2.0
//
// Corpus-level metrics: detection precision/recall with MALICIOUS as the
// positive class, and the separation between per-diff mean FSS of benign
// and malicious functions.

#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "diffsense/model.hpp"

namespace diffsense::evaluator {

struct LabeledVerdict {
  std::string diff_id;
  VerdictKind verdict = VerdictKind::Unknown;
  std::optional<Label> label;
};

struct DetectionMetrics {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::size_t unknown = 0;  // also counted as negative predictions above
  std::optional<double> precision;  // absent when tp + fp == 0
  std::optional<double> recall;     // absent when tp + fn == 0

  std::size_t total() const { return tp + fp + tn + fn; }
};

/// Unknown verdicts count as BENIGN. Throws Error naming the first diff
/// without a ground-truth label.
DetectionMetrics detection_metrics(std::span<const LabeledVerdict> verdicts);

/// Linear interpolation between closest ranks over sorted data, p in [0,1].
double quantile(std::span<const double> sorted, double p);

struct BoxStats {
  std::size_t n = 0;
  double min = 0, q1 = 0, median = 0, q3 = 0, max = 0, mean = 0;
  /// Most extreme data points within 1.5 IQR of the box.
  double lower_whisker = 0, upper_whisker = 0;
};

/// Throws Error on an empty sample.
BoxStats box_stats(std::vector<double> values);

struct DiffFunctionScores {
  std::string diff_id;
  std::vector<double> benign;
  std::vector<double> malicious;
};

/// Scores of every labeled function that has an analysis.
DiffFunctionScores collect_scores(std::string diff_id, const DiffArtifact& artifact,
                                  const std::map<std::string, FunctionAnalysis>& analyses);

struct SeparationStats {
  std::vector<double> fss_ben;  // one mean per diff with benign functions
  std::vector<double> fss_mal;
  std::optional<BoxStats> ben;
  std::optional<BoxStats> mal;
  std::optional<double> separation;       // median(mal) - median(ben)
  std::optional<double> mean_separation;  // mean(mal) - mean(ben)
};

/// Throws Error when no diff carries any labeled function.
SeparationStats fss_separation(std::span<const DiffFunctionScores> diffs);

}  // namespace diffsense::evaluator
