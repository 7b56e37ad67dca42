// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "diffsense/evaluator.hpp"

using namespace diffsense;
using evaluator::LabeledVerdict;

namespace {

std::vector<LabeledVerdict> make(int tp, int fp, int fn, int tn) {
  std::vector<LabeledVerdict> v;
  int id = 0;
  auto add = [&](int n, VerdictKind k, Label l) {
    for (int i = 0; i < n; ++i) v.push_back({"d" + std::to_string(id++), k, l});
  };
  add(tp, VerdictKind::Malicious, Label::Malicious);
  add(fp, VerdictKind::Malicious, Label::Benign);
  add(fn, VerdictKind::Benign, Label::Malicious);
  add(tn, VerdictKind::Benign, Label::Benign);
  return v;
}

// Sort, then interpolate between closest ranks.
double brute_quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  double h = (static_cast<double>(v.size()) - 1) * p;
  auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= v.size()) return v.back();
  return v[lo] + (h - static_cast<double>(lo)) * (v[lo + 1] - v[lo]);
}

}  // namespace

TEST(Detection, Examples) {
  auto m = evaluator::detection_metrics(make(2, 0, 1, 5));
  EXPECT_DOUBLE_EQ(*m.precision, 1.0);
  EXPECT_NEAR(*m.recall, 0.667, 1e-3);

  auto none = evaluator::detection_metrics(make(0, 0, 3, 2));
  EXPECT_FALSE(none.precision.has_value());
  EXPECT_DOUBLE_EQ(*none.recall, 0.0);

  auto perfect = evaluator::detection_metrics(make(4, 0, 0, 4));
  EXPECT_DOUBLE_EQ(*perfect.precision, 1.0);
  EXPECT_DOUBLE_EQ(*perfect.recall, 1.0);
}

TEST(Detection, UnknownCountsAsBenignAndIsTallied) {
  std::vector<LabeledVerdict> v = {{"a", VerdictKind::Unknown, Label::Malicious},
                                   {"b", VerdictKind::Unknown, Label::Benign},
                                   {"c", VerdictKind::Malicious, Label::Malicious}};
  auto m = evaluator::detection_metrics(v);
  EXPECT_EQ(m.unknown, 2u);
  EXPECT_EQ(m.fn, 1u);
  EXPECT_EQ(m.tn, 1u);
  EXPECT_DOUBLE_EQ(*m.recall, 0.5);
}

TEST(Detection, MissingLabelNamesTheDiff) {
  std::vector<LabeledVerdict> v = {{"unlabeled-diff", VerdictKind::Benign, std::nullopt}};
  try {
    evaluator::detection_metrics(v);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("unlabeled-diff"), std::string::npos);
  }
}

TEST(Detection, PermutationInvariantAndBenignMonotone) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    auto v = make(static_cast<int>(rng() % 5), static_cast<int>(rng() % 5),
                  static_cast<int>(rng() % 5), static_cast<int>(rng() % 5));
    auto base = evaluator::detection_metrics(v);
    std::shuffle(v.begin(), v.end(), rng);
    auto shuffled = evaluator::detection_metrics(v);
    EXPECT_EQ(base.precision, shuffled.precision);
    EXPECT_EQ(base.recall, shuffled.recall);

    v.push_back({"extra", VerdictKind::Benign, Label::Benign});
    auto more = evaluator::detection_metrics(v);
    EXPECT_EQ(more.recall, base.recall);
    if (base.precision) EXPECT_GE(*more.precision, *base.precision);
  }
}

TEST(Quantile, MatchesBruteForceOracle) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> v(1 + rng() % 40);
    for (auto& x : v) x = static_cast<double>(rng() % 10000) / 100.0;
    auto sorted = v;
    std::sort(sorted.begin(), sorted.end());
    for (double p : {0.0, 0.25, 0.5, 0.75, 1.0, 0.1}) {
      EXPECT_NEAR(evaluator::quantile(sorted, p), brute_quantile(v, p), 1e-12);
    }
  }
}

TEST(BoxStats, WhiskersAtOneAndAHalfIqr) {
  auto b = evaluator::box_stats({1, 2, 3, 4, 5, 6, 7, 8, 100});
  EXPECT_DOUBLE_EQ(b.q1, 3);
  EXPECT_DOUBLE_EQ(b.median, 5);
  EXPECT_DOUBLE_EQ(b.q3, 7);
  EXPECT_DOUBLE_EQ(b.lower_whisker, 1);
  EXPECT_DOUBLE_EQ(b.upper_whisker, 8);
  EXPECT_DOUBLE_EQ(b.max, 100);
  EXPECT_THROW(evaluator::box_stats({}), Error);
}

TEST(Separation, Examples) {
  std::vector<evaluator::DiffFunctionScores> d = {{"x", {2.0, 2.0}, {6.0}}, {"y", {2.0}, {6.0}}};
  auto s = evaluator::fss_separation(d);
  EXPECT_DOUBLE_EQ(*s.separation, 4.0);

  std::vector<evaluator::DiffFunctionScores> single = {{"z", {0.0, 4.0}, {6.0}}};
  auto t = evaluator::fss_separation(single);
  EXPECT_EQ(t.fss_ben, std::vector<double>{2.0});
  EXPECT_EQ(t.fss_mal, std::vector<double>{6.0});

  std::vector<evaluator::DiffFunctionScores> benign_only = {{"b", {1.0}, {}}};
  EXPECT_FALSE(evaluator::fss_separation(benign_only).separation.has_value());

  std::vector<evaluator::DiffFunctionScores> empty = {{"e", {}, {}}};
  EXPECT_THROW(evaluator::fss_separation(empty), Error);
}

TEST(Separation, CollectScoresUsesFunctionLabels) {
  DiffArtifact a;
  a.function_labels = std::map<std::string, Label>{{"m", Label::Malicious}, {"b", Label::Benign},
                                                   {"missing", Label::Benign}};
  std::map<std::string, FunctionAnalysis> analyses;
  analyses["m"].score.tenths = 79;
  analyses["b"].score.tenths = 0;
  auto s = evaluator::collect_scores("d", a, analyses);
  EXPECT_EQ(s.malicious, std::vector<double>{7.9});
  EXPECT_EQ(s.benign, std::vector<double>{0.0});
}
