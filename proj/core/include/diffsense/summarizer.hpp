// SPDX-License-Identifier: Apache-2.0
//
// Two-turn summarize-then-classify protocol over the diff callgraph.
//
// Turn one sends the function's decompiled code, the summaries of its
// in-diff callees and, for modified functions, the textual diff; the model
// answers with a fenced JSON `{summary, diff_summary}`. Turn two continues
// the same conversation and asks for the five FSS category levels.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "diffsense/callgraph.hpp"
#include "diffsense/llm_backend.hpp"
#include "diffsense/model.hpp"

namespace diffsense::summarizer {

inline constexpr std::string_view kCycleStub = "summary unavailable: mutual recursion";
inline constexpr std::string_view kFailedStub = "summary unavailable: analysis failed";

struct DependencySummary {
  std::string name;
  std::string summary;  // or one of the stub texts above
};

struct PromptLimits {
  std::size_t code_chars = 24'000;
  std::size_t diff_chars = 24'000;
};

std::vector<ChatMessage> build_summary_prompt(const FunctionRecord& fn,
                                              std::span<const DependencySummary> deps,
                                              std::string_view project_description,
                                              const PromptLimits& limits = {});

std::vector<ChatMessage> build_fss_prompt(std::vector<ChatMessage> prior);

/// Cuts `code` to `budget` characters and appends a truncation marker.
std::string truncate_code(std::string_view code, std::size_t budget);

/// Keeps whole hunks while the text fits in `budget` characters.
std::string truncate_diff(std::string_view diff_text, std::size_t budget);

/// Content of the first fenced block that holds a JSON object. Throws
/// ParseError when there is none.
std::string extract_fenced_json(std::string_view reply);

struct SummaryReply {
  std::string summary;
  std::optional<std::string> diff_summary;
};

SummaryReply parse_summary_reply(std::string_view reply);
FssClassification parse_fss_reply(std::string_view reply);

struct SummarizerConfig {
  std::size_t concurrency = 4;
  PromptLimits limits;
  /// When set, analyses are cached under `<run_dir>/analyses/` and the full
  /// conversations logged under `<run_dir>/prompts/`.
  std::optional<std::filesystem::path> run_dir;
};

struct FunctionFailure {
  std::string name;
  std::string error;
};

struct SummarizationResult {
  std::map<std::string, FunctionAnalysis> analyses;
  std::vector<FunctionFailure> failures;  // schedule order
  TokenUsage usage;                        // over all analyses, cached included
  TokenUsage fresh_usage;                  // consumed by this run only
  std::size_t backend_calls = 0;
  std::size_t cache_hits = 0;
};

/// `artifact` should be prepared (canonical names, text diffs). A function
/// is only prompted once every callee outside its own cycle has finished.
SummarizationResult run_summarization(const DiffArtifact& artifact, const Schedule& schedule,
                                      ChatBackend& backend, const SummarizerConfig& config);

}  // namespace diffsense::summarizer
