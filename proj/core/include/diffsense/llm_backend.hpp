// SPDX-License-Identifier: Apache-2.0
//
// Chat-completion backends. HttpChatBackend speaks the OpenAI-compatible
// `/chat/completions` protocol; MockChatBackend answers deterministically
// from a substring rule table so the pipeline can run offline.

#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "diffsense/model.hpp"

namespace diffsense {

class BackendError : public Error {
 public:
  using Error::Error;
};

enum class Role { System, User, Assistant };

std::string_view to_string(Role role);

struct ChatMessage {
  Role role = Role::User;
  std::string content;

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct Completion {
  std::string reply;
  TokenUsage usage;
};

enum class ReasoningEffort { Low, Medium, High };

std::string_view to_string(ReasoningEffort effort);
std::optional<ReasoningEffort> parse_reasoning_effort(std::string_view text);

struct BackendConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-5-mini";
  double temperature = 1.0;
  double top_p = 1.0;
  std::optional<ReasoningEffort> reasoning_effort;
  unsigned max_retries = 3;
  std::chrono::milliseconds timeout{120'000};
  std::chrono::milliseconds backoff_base{500};

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

inline constexpr const char* kApiKeyEnv = "LLM_API_KEY";

/// Implementations must tolerate concurrent complete() calls.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;

  /// `messages` must be non-empty and end with a User message.
  virtual Completion complete(std::span<const ChatMessage> messages) = 0;

  /// Identifies the model for cache keys and reports.
  virtual std::string model_id() const = 0;
};

/// Throws ConfigError unless the conversation is non-empty, every message
/// has content and the last one comes from the user.
void check_conversation(std::span<const ChatMessage> messages);

class HttpChatBackend final : public ChatBackend {
 public:
  /// Throws ConfigError if the config is invalid or `api_key` is empty.
  HttpChatBackend(BackendConfig config, std::string api_key);

  /// Reads the key from LLM_API_KEY; throws ConfigError when unset.
  static std::unique_ptr<HttpChatBackend> from_environment(BackendConfig config);

  Completion complete(std::span<const ChatMessage> messages) override;
  std::string model_id() const override { return config_.model; }

  /// Total HTTP attempts made so far, retries included.
  std::size_t attempts() const { return attempts_.load(); }

  /// The JSON request body sent for `messages`.
  std::string request_body(std::span<const ChatMessage> messages) const;

 private:
  BackendConfig config_;
  std::string api_key_;
  std::string scheme_host_port_;
  std::string path_prefix_;
  std::atomic<std::size_t> attempts_{0};
};

/// One row of the mock rule table: a code substring and the levels it
/// implies. Unset categories stay at none.
struct MockRule {
  std::string pattern;
  FssClassification levels;
};

std::vector<MockRule> default_mock_rules();

/// How the mock answers prediction prompts.
struct MockVerdictPolicy {
  enum class Mode {
    Threshold,  // MALICIOUS iff some listed function scores >= threshold
    Fixed,      // always reply with `fixed_reply`
  };
  Mode mode = Mode::Threshold;
  double threshold = 5.0;
  std::string fixed_reply;
};

// Markers shared by the prompt builders and the mock.
inline constexpr std::string_view kCodeBlockOpen = "```c\n";
inline constexpr std::string_view kCodeSectionTitle = "## Decompiled code";
inline constexpr std::string_view kDiffSectionTitle = "## Textual diff";
inline constexpr std::string_view kFssRequestMarker = "## FSS classification request";
inline constexpr std::string_view kPredictionMarker = "## Update verdict request";
inline constexpr std::string_view kRankedScorePrefix = "FSS score: ";

class MockChatBackend final : public ChatBackend {
 public:
  explicit MockChatBackend(std::vector<MockRule> rules = default_mock_rules(),
                           MockVerdictPolicy verdict = {});

  Completion complete(std::span<const ChatMessage> messages) override;
  std::string model_id() const override { return "mock"; }

  /// Calls whose conversation contains `needle` throw BackendError.
  void fail_when(std::string needle);

  std::size_t calls() const { return calls_.load(); }

  /// Every conversation received, in arrival order.
  std::vector<std::vector<ChatMessage>> captured() const;

  /// Classification the mock assigns to `code`: element-wise maximum over
  /// the levels of all matching rules.
  FssClassification classify(std::string_view code) const;

  const std::vector<MockRule>& rules() const { return rules_; }

 private:
  std::string summary_reply(std::string_view code, bool modified) const;
  std::string fss_reply(std::string_view code) const;
  std::string verdict_reply(std::string_view prompt) const;

  std::vector<MockRule> rules_;
  MockVerdictPolicy verdict_;
  std::vector<std::string> fail_needles_;
  std::atomic<std::size_t> calls_{0};
  mutable std::mutex mu_;
  std::vector<std::vector<ChatMessage>> captured_;
};

/// Text between the `## Decompiled code` fence pair of the first user
/// message, or empty if there is none.
std::string_view extract_code_block(std::span<const ChatMessage> messages);

/// Rough token estimate (one token per four bytes, rounded up).
std::uint64_t estimate_tokens(std::string_view text);

}  // namespace diffsense
