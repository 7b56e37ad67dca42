// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <charconv>
#include <nlohmann/json.hpp>

#include "diffsense/llm_backend.hpp"

namespace diffsense {

namespace {

FssClassification levels(std::initializer_list<std::pair<FssCategory, FssLevel>> items) {
  FssClassification cls;
  for (auto [c, l] : items) cls.set(c, l);
  return cls;
}

constexpr auto B = FssCategory::Behaviors;
constexpr auto R = FssCategory::Resources;
constexpr auto C = FssCategory::Confidentiality;
constexpr auto I = FssCategory::Integrity;
constexpr auto A = FssCategory::Availability;
constexpr auto Lo = FssLevel::Low;
constexpr auto Me = FssLevel::Medium;
constexpr auto Hi = FssLevel::High;

bool any_user_contains(std::span<const ChatMessage> messages, std::string_view needle) {
  return std::any_of(messages.begin(), messages.end(), [&](const ChatMessage& m) {
    return m.role == Role::User && m.content.find(needle) != std::string::npos;
  });
}

std::string fenced(const nlohmann::ordered_json& j) { return "```json\n" + j.dump(2) + "\n```"; }

}  // namespace

std::vector<MockRule> default_mock_rules() {
  return {
      {"socket(", levels({{B, Hi}, {R, Hi}})},
      {"connect(", levels({{B, Hi}, {R, Hi}})},
      {"execve", levels({{C, Hi}, {I, Hi}})},
      {"/bin/sh", levels({{C, Hi}, {I, Hi}})},
      {"encrypt", levels({{I, Hi}})},
      {"AES", levels({{I, Hi}})},
      {"fork(", levels({{B, Me}})},
      {"dup2(", levels({{B, Me}, {C, Me}})},
      {"sendto(", levels({{R, Hi}, {A, Hi}})},
      {"getenv(", levels({{B, Lo}})},
      {"readdir(", levels({{B, Me}, {R, Me}})},
      {"unlink(", levels({{I, Me}, {A, Lo}})},
  };
}

std::string_view extract_code_block(std::span<const ChatMessage> messages) {
  for (const auto& m : messages) {
    if (m.role != Role::User) continue;
    std::string_view text = m.content;
    auto title = text.find(kCodeSectionTitle);
    if (title == std::string_view::npos) return {};
    auto open = text.find(kCodeBlockOpen, title);
    if (open == std::string_view::npos) return {};
    auto begin = open + kCodeBlockOpen.size();
    auto close = text.find("\n```", begin);
    if (close == std::string_view::npos) return {};
    return text.substr(begin, close - begin);
  }
  return {};
}

MockChatBackend::MockChatBackend(std::vector<MockRule> rules, MockVerdictPolicy verdict)
    : rules_(std::move(rules)), verdict_(std::move(verdict)) {
  for (const auto& r : rules_) {
    if (r.pattern.empty()) throw ConfigError("mock rule patterns must not be empty");
  }
}

void MockChatBackend::fail_when(std::string needle) { fail_needles_.push_back(std::move(needle)); }

std::vector<std::vector<ChatMessage>> MockChatBackend::captured() const {
  std::lock_guard lock(mu_);
  return captured_;
}

FssClassification MockChatBackend::classify(std::string_view code) const {
  FssClassification cls;
  for (const auto& r : rules_) {
    if (code.find(r.pattern) != std::string_view::npos) cls = cls.merged(r.levels);
  }
  return cls;
}

std::string MockChatBackend::summary_reply(std::string_view code, bool modified) const {
  std::vector<std::string> hits;
  for (const auto& r : rules_) {
    if (code.find(r.pattern) != std::string_view::npos) hits.push_back(r.pattern);
  }
  auto lines = static_cast<std::size_t>(std::count(code.begin(), code.end(), '\n')) + 1;
  std::string summary = "The function spans " + std::to_string(lines) + " lines of decompiled code.";
  if (hits.empty()) {
    summary += " It performs routine computation with no sensitive operations.";
  } else {
    summary += " It invokes sensitive operations:";
    for (std::size_t i = 0; i < hits.size(); ++i) summary += (i ? ", " : " ") + hits[i];
    summary += ".";
  }
  nlohmann::ordered_json j;
  j["summary"] = summary;
  if (modified) j["diff_summary"] = "The update changes the statements shown in the diff.";
  return "Here is my analysis.\n\n" + fenced(j);
}

std::string MockChatBackend::fss_reply(std::string_view code) const {
  FssClassification cls = classify(code);
  nlohmann::ordered_json j;
  for (FssCategory c : kAllCategories) j[std::string(category_name(c))] = to_string(cls.get(c));
  return "Classification follows.\n\n" + fenced(j);
}

std::string MockChatBackend::verdict_reply(std::string_view prompt) const {
  if (verdict_.mode == MockVerdictPolicy::Mode::Fixed) return verdict_.fixed_reply;
  double best = 0.0;
  std::size_t pos = 0;
  while ((pos = prompt.find(kRankedScorePrefix, pos)) != std::string_view::npos) {
    pos += kRankedScorePrefix.size();
    auto end = prompt.find_first_not_of("0123456789.", pos);
    auto num = prompt.substr(pos, end == std::string_view::npos ? end : end - pos);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), v);
    if (ec == std::errc{}) best = std::max(best, v);
  }
  if (best >= verdict_.threshold) {
    return "At least one changed function shows behaviour unrelated to the project's purpose.\n"
           "VERDICT: MALICIOUS";
  }
  return "The changes are consistent with the project description.\nVERDICT: BENIGN";
}

Completion MockChatBackend::complete(std::span<const ChatMessage> messages) {
  check_conversation(messages);
  ++calls_;
  {
    std::lock_guard lock(mu_);
    captured_.emplace_back(messages.begin(), messages.end());
  }

  std::string all;
  for (const auto& m : messages) all += m.content;
  for (const auto& needle : fail_needles_) {
    if (all.find(needle) != std::string::npos) {
      throw BackendError("mock backend configured to fail on '" + needle + "'");
    }
  }

  Completion out;
  if (any_user_contains(messages, kPredictionMarker)) {
    auto it = std::find_if(messages.begin(), messages.end(), [](const ChatMessage& m) {
      return m.role == Role::User && m.content.find(kPredictionMarker) != std::string::npos;
    });
    out.reply = verdict_reply(it->content);
  } else if (any_user_contains(messages, kFssRequestMarker)) {
    out.reply = fss_reply(extract_code_block(messages));
  } else {
    bool modified = any_user_contains(messages, kDiffSectionTitle);
    out.reply = summary_reply(extract_code_block(messages), modified);
  }
  for (const auto& m : messages) out.usage.input_tokens += estimate_tokens(m.content);
  out.usage.output_tokens = estimate_tokens(out.reply);
  return out;
}

}  // namespace diffsense
