// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <deque>

#include "diffsense/fss.hpp"
#include "diffsense/predictor.hpp"

using namespace diffsense;

namespace {

FunctionAnalysis analysis(const std::string& name, const std::string& vector) {
  FunctionAnalysis a;
  a.id.display_name = name;
  a.summary = "summary of " + name;
  a.classification = fss::parse_vector(vector);
  a.score = fss::score(a.classification);
  return a;
}

std::map<std::string, FunctionAnalysis> sample() {
  std::map<std::string, FunctionAnalysis> m;
  for (auto a : {analysis("a", "B:L/C:L"), analysis("b", "B:H/R:H/A:H"), analysis("c", "B:L/C:L"),
                 analysis("d", "B:N"), analysis("e", "B:M/I:M")})
    m.emplace(a.id.display_name, a);
  return m;
}

DiffArtifact artifact_for(const std::map<std::string, FunctionAnalysis>& m) {
  DiffArtifact a;
  a.old_binary.name = a.new_binary.name = "demo";
  a.old_binary.version = "1.0";
  a.new_binary.version = "1.1";
  a.new_binary.changelog = "- fix parser\n";
  for (const auto& [name, fa] : m) {
    FunctionRecord r;
    r.id.display_name = name;
    r.code_new = "x";
    a.functions.push_back(r);
  }
  return a;
}

class Scripted : public ChatBackend {
 public:
  explicit Scripted(std::deque<std::string> r) : replies(std::move(r)) {}
  Completion complete(std::span<const ChatMessage> m) override {
    convs.emplace_back(m.begin(), m.end());
    auto reply = replies.front();
    replies.pop_front();
    return {reply, {5, 1}};
  }
  std::string model_id() const override { return "scripted"; }
  std::deque<std::string> replies;
  std::vector<std::vector<ChatMessage>> convs;
};

}  // namespace

TEST(Predictor, TopKOrdering) {
  auto top = predictor::select_top_k(sample(), 3);
  ASSERT_EQ(top.size(), 3u);
  EXPECT_EQ(top[0].id.display_name, "b");
  EXPECT_EQ(top[1].id.display_name, "e");
  EXPECT_EQ(top[2].id.display_name, "a");  // ties with c, broken by name
  EXPECT_EQ(predictor::select_top_k(sample(), 50).size(), 5u);
  EXPECT_THROW(predictor::select_top_k(sample(), 0), ConfigError);
}

TEST(Predictor, ParseVerdict) {
  EXPECT_EQ(predictor::parse_verdict("VERDICT: MALICIOUS"), VerdictKind::Malicious);
  EXPECT_EQ(predictor::parse_verdict("reasoning...\nverdict: benign"), VerdictKind::Benign);
  EXPECT_EQ(predictor::parse_verdict("Verdict: BENIGN\nVERDICT: **MALICIOUS**"),
            VerdictKind::Malicious);
  EXPECT_FALSE(predictor::parse_verdict("I cannot tell").has_value());
}

TEST(Predictor, MockThresholdVerdict) {
  auto m = sample();
  MockChatBackend mock;
  auto v = predictor::predict(mock, artifact_for(m), m, {5, false});
  EXPECT_EQ(v.verdict, VerdictKind::Malicious);
  ASSERT_EQ(v.top_functions.size(), 5u);
  EXPECT_EQ(v.top_functions[0].id.display_name, "b");

  m.erase("b");
  auto benign = predictor::predict(mock, artifact_for(m), m, {5, false});
  EXPECT_EQ(benign.verdict, VerdictKind::Benign);
}

TEST(Predictor, FixedMockReplyYieldsMalicious) {
  MockVerdictPolicy p;
  p.mode = MockVerdictPolicy::Mode::Fixed;
  p.fixed_reply = "VERDICT: MALICIOUS";
  MockChatBackend mock(default_mock_rules(), p);
  auto m = sample();
  auto v = predictor::predict(mock, artifact_for(m), m, {2, false});
  EXPECT_EQ(v.verdict, VerdictKind::Malicious);
  EXPECT_EQ(v.top_functions.size(), 2u);
}

TEST(Predictor, RepromptThenUnknown) {
  auto m = sample();
  Scripted once({"hmm", "VERDICT: BENIGN"});
  auto v = predictor::predict(once, artifact_for(m), m, {});
  EXPECT_EQ(v.verdict, VerdictKind::Benign);
  EXPECT_EQ(v.usage, (TokenUsage{10, 2}));
  EXPECT_EQ(once.convs[1].size(), 4u);

  Scripted never({"hmm", "still unsure"});
  EXPECT_EQ(predictor::predict(never, artifact_for(m), m, {}).verdict, VerdictKind::Unknown);
}

TEST(Predictor, EmptyDiffIsBenignWithoutCalls) {
  Scripted none({});
  DiffArtifact empty;
  auto v = predictor::predict(none, empty, {}, {});
  EXPECT_EQ(v.verdict, VerdictKind::Benign);
  EXPECT_TRUE(none.convs.empty());
}

TEST(Predictor, ChangelogOnlyWhenRequested) {
  auto m = sample();
  auto a = artifact_for(m);
  auto top = predictor::select_top_k(m, 5);
  auto without = predictor::build_prediction_prompt(top, a.old_binary, a.new_binary, false);
  auto with = predictor::build_prediction_prompt(top, a.old_binary, a.new_binary, true);
  EXPECT_EQ(without.back().content.find("## Changelog"), std::string::npos);
  EXPECT_NE(with.back().content.find("## Changelog\n- fix parser"), std::string::npos);
  EXPECT_NE(with.back().content.find("FSS score: 7.9"), std::string::npos);
}
