// SPDX-License-Identifier: Apache-2.0

#include "diffsense/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace diffsense::evaluator {

DetectionMetrics detection_metrics(std::span<const LabeledVerdict> verdicts) {
  DetectionMetrics m;
  for (const auto& v : verdicts) {
    if (!v.label) throw Error("diff '" + v.diff_id + "' has no ground-truth label");
    bool predicted_positive = v.verdict == VerdictKind::Malicious;
    if (v.verdict == VerdictKind::Unknown) ++m.unknown;
    bool actual_positive = *v.label == Label::Malicious;
    if (predicted_positive && actual_positive) ++m.tp;
    else if (predicted_positive) ++m.fp;
    else if (actual_positive) ++m.fn;
    else ++m.tn;
  }
  if (m.tp + m.fp > 0) m.precision = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
  if (m.tp + m.fn > 0) m.recall = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
  return m;
}

double quantile(std::span<const double> sorted, double p) {
  if (sorted.empty()) throw Error("quantile of empty sample");
  double pos = p * static_cast<double>(sorted.size() - 1);
  auto lo = static_cast<std::size_t>(std::floor(pos));
  auto hi = std::min(lo + 1, sorted.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * frac;
}

BoxStats box_stats(std::vector<double> values) {
  if (values.empty()) throw Error("box statistics of empty sample");
  std::sort(values.begin(), values.end());
  BoxStats s;
  s.n = values.size();
  s.min = values.front();
  s.max = values.back();
  s.q1 = quantile(values, 0.25);
  s.median = quantile(values, 0.5);
  s.q3 = quantile(values, 0.75);
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.n);
  double iqr = s.q3 - s.q1;
  double lo_fence = s.q1 - 1.5 * iqr;
  double hi_fence = s.q3 + 1.5 * iqr;
  s.lower_whisker = *std::find_if(values.begin(), values.end(),
                                  [&](double v) { return v >= lo_fence; });
  s.upper_whisker = *std::find_if(values.rbegin(), values.rend(),
                                  [&](double v) { return v <= hi_fence; });
  return s;
}

DiffFunctionScores collect_scores(std::string diff_id, const DiffArtifact& artifact,
                                  const std::map<std::string, FunctionAnalysis>& analyses) {
  DiffFunctionScores out;
  out.diff_id = std::move(diff_id);
  if (!artifact.function_labels) return out;
  for (const auto& [name, label] : *artifact.function_labels) {
    auto it = analyses.find(name);
    if (it == analyses.end()) continue;
    (label == Label::Malicious ? out.malicious : out.benign).push_back(it->second.score.value());
  }
  return out;
}

namespace {

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

SeparationStats fss_separation(std::span<const DiffFunctionScores> diffs) {
  SeparationStats s;
  for (const auto& d : diffs) {
    if (!d.benign.empty()) s.fss_ben.push_back(mean(d.benign));
    if (!d.malicious.empty()) s.fss_mal.push_back(mean(d.malicious));
  }
  if (s.fss_ben.empty() && s.fss_mal.empty()) {
    throw Error("corpus has no labeled functions; FSS separation is undefined");
  }
  if (!s.fss_ben.empty()) s.ben = box_stats(s.fss_ben);
  if (!s.fss_mal.empty()) s.mal = box_stats(s.fss_mal);
  if (s.ben && s.mal) {
    s.separation = s.mal->median - s.ben->median;
    s.mean_separation = s.mal->mean - s.ben->mean;
  }
  return s;
}

}  // namespace diffsense::evaluator
