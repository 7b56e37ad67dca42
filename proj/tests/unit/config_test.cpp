// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "diffsense/config.hpp"

using namespace diffsense;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Config, DefaultsFromEmptyFile) {
  auto c = parse_config("");
  EXPECT_EQ(c.backend.kind, BackendKind::Mock);
  EXPECT_EQ(c.predict.k, 5u);
  EXPECT_FALSE(c.predict.include_changelog);
  EXPECT_EQ(c.concurrency, 4u);
  EXPECT_EQ(c.limits.code_chars, 24000u);
  EXPECT_EQ(c.eval_k, (std::vector<std::size_t>{5, 10}));
  EXPECT_EQ(c.eval_changelog, (std::vector<bool>{false, true}));
}

TEST(Config, FullFile) {
  auto c = parse_config(R"(# comment
[backend]
kind = "http"            # trailing comment
base_url = "http://localhost:8080/v1"
model = "local-model"
temperature = 0
top_p = 0.95
reasoning_effort = "low"
max_retries = 5
timeout_ms = 30_000

[predict_backend]
kind = "mock"
verdict_reply = "VERDICT: BENIGN"

[predictor]
k = 10
changelog = true

[summarizer]
concurrency = 8
code_budget = 1000

[evaluate]
k_values = [1, 3]
changelog_modes = [true]
)");
  EXPECT_EQ(c.backend.kind, BackendKind::Http);
  EXPECT_EQ(c.backend.http.base_url, "http://localhost:8080/v1");
  EXPECT_DOUBLE_EQ(c.backend.http.temperature, 0.0);
  EXPECT_DOUBLE_EQ(c.backend.http.top_p, 0.95);
  EXPECT_EQ(c.backend.http.reasoning_effort, ReasoningEffort::Low);
  EXPECT_EQ(c.backend.http.max_retries, 5u);
  EXPECT_EQ(c.backend.http.timeout.count(), 30000);
  ASSERT_TRUE(c.predict_backend.has_value());
  EXPECT_EQ(c.prediction_backend().mock.mode, MockVerdictPolicy::Mode::Fixed);
  EXPECT_EQ(c.predict.k, 10u);
  EXPECT_TRUE(c.predict.include_changelog);
  EXPECT_EQ(c.concurrency, 8u);
  EXPECT_EQ(c.limits.code_chars, 1000u);
  EXPECT_EQ(c.eval_k, (std::vector<std::size_t>{1, 3}));
  EXPECT_EQ(c.eval_changelog, std::vector<bool>{true});
}

TEST(Config, ValidationErrors) {
  EXPECT_NE(error_of("[predictor]\nk = 0\n").find("k"), std::string::npos);
  EXPECT_FALSE(error_of("[evaluate]\nk_values = [5, 0]\n").empty());
  EXPECT_FALSE(error_of("[backend]\ntop_p = 1.5\n").empty());
  EXPECT_FALSE(error_of("[backend]\nkind = \"grpc\"\n").empty());
  EXPECT_FALSE(error_of("[summarizer]\nconcurrency = 0\n").empty());
}

TEST(Config, SyntaxErrorsCarryLineNumbers) {
  EXPECT_NE(error_of("[backend]\nmodel = \"x\"\nmodel = \"y\"\n").find("line 3"),
            std::string::npos);
  EXPECT_NE(error_of("[predictor]\n\nk = five\n").find("line 3"), std::string::npos);
  EXPECT_NE(error_of("[nope]\n").find("unknown section"), std::string::npos);
  EXPECT_NE(error_of("[predictor]\nkk = 1\n").find("unknown key"), std::string::npos);
  EXPECT_NE(error_of("k = 1\n").find("section"), std::string::npos);
  EXPECT_FALSE(error_of("[backend]\nmodel = \"unterminated\n").empty());
  EXPECT_FALSE(error_of("[predictor]\nk = \"5\"\n").empty());
}

TEST(Config, ApiKeyIsRejected) {
  EXPECT_NE(error_of("[backend]\napi_key = \"sk-123\"\n").find("LLM_API_KEY"), std::string::npos);
}
