// SPDX-License-Identifier: Apache-2.0
//
// Per-diff MALICIOUS/BENIGN verdict from the k most sensitive functions.

#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "diffsense/llm_backend.hpp"
#include "diffsense/model.hpp"

namespace diffsense::predictor {

struct PredictConfig {
  std::size_t k = 5;
  bool include_changelog = false;
};

/// Score descending, ties by display name ascending; at most k entries.
/// Throws ConfigError when k is 0.
std::vector<FunctionAnalysis> select_top_k(const std::map<std::string, FunctionAnalysis>& analyses,
                                           std::size_t k);

std::vector<ChatMessage> build_prediction_prompt(std::span<const FunctionAnalysis> top,
                                                 const BinaryMeta& old_meta,
                                                 const BinaryMeta& new_meta,
                                                 bool include_changelog);

/// Last `VERDICT: MALICIOUS|BENIGN` in the reply, case-insensitive.
std::optional<VerdictKind> parse_verdict(std::string_view reply);

/// Starts a fresh conversation; one corrective re-prompt when no verdict
/// line is found, Unknown after that. A diff without functions is Benign
/// without asking the model. Transport errors propagate.
DiffVerdict predict(ChatBackend& backend, const DiffArtifact& artifact,
                    const std::map<std::string, FunctionAnalysis>& analyses,
                    const PredictConfig& config);

}  // namespace diffsense::predictor
