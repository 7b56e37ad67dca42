// SPDX-License-Identifier: Apache-2.0
//
// Run configuration read from a small TOML subset:
//
//   [backend]            kind = "mock" | "http", base_url, model, temperature,
//                        top_p, reasoning_effort, max_retries, timeout_ms,
//                        backoff_ms, verdict_threshold, verdict_reply
//   [predict_backend]    same keys; used for the verdict step when present
//   [predictor]          k, changelog
//   [summarizer]         concurrency, code_budget, diff_budget
//   [evaluate]           k_values = [5, 10], changelog_modes = [false, true]
//
// Secrets never live here; an `api_key` entry is rejected.

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "diffsense/llm_backend.hpp"
#include "diffsense/predictor.hpp"
#include "diffsense/summarizer.hpp"

namespace diffsense {

enum class BackendKind { Mock, Http };

struct BackendSettings {
  BackendKind kind = BackendKind::Mock;
  BackendConfig http;
  MockVerdictPolicy mock;
};

struct AppConfig {
  BackendSettings backend;
  std::optional<BackendSettings> predict_backend;
  predictor::PredictConfig predict;
  std::size_t concurrency = 4;
  summarizer::PromptLimits limits;
  std::vector<std::size_t> eval_k = {5, 10};
  std::vector<bool> eval_changelog = {false, true};

  /// Throws ConfigError on values no run can use (k = 0, empty sweeps, ...).
  void validate() const;

  const BackendSettings& prediction_backend() const {
    return predict_backend ? *predict_backend : backend;
  }
};

/// Parses and validates. Errors carry the line number.
AppConfig parse_config(std::string_view text);
AppConfig load_config(const std::filesystem::path& path);

/// HTTP backends read LLM_API_KEY here and fail with ConfigError without it.
std::unique_ptr<ChatBackend> make_backend(const BackendSettings& settings);

}  // namespace diffsense
