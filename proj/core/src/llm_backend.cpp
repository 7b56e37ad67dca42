// SPDX-License-Identifier: Apache-2.0

#include "diffsense/llm_backend.hpp"

#include <httplib.h>

#include <cmath>
#include <cstdlib>
#include <nlohmann/json.hpp>
#include <thread>

namespace diffsense {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
  }
  return "?";
}

std::string_view to_string(ReasoningEffort effort) {
  switch (effort) {
    case ReasoningEffort::Low: return "low";
    case ReasoningEffort::Medium: return "medium";
    case ReasoningEffort::High: return "high";
  }
  return "?";
}

std::optional<ReasoningEffort> parse_reasoning_effort(std::string_view text) {
  if (text == "low") return ReasoningEffort::Low;
  if (text == "medium") return ReasoningEffort::Medium;
  if (text == "high") return ReasoningEffort::High;
  return std::nullopt;
}

void BackendConfig::validate() const {
  if (!(temperature >= 0.0) || !std::isfinite(temperature))
    throw ConfigError("temperature must be >= 0");
  if (!(top_p > 0.0 && top_p <= 1.0)) throw ConfigError("top_p must be in (0, 1]");
  if (model.empty()) throw ConfigError("model must not be empty");
  if (timeout.count() <= 0) throw ConfigError("timeout must be positive");
}

void check_conversation(std::span<const ChatMessage> messages) {
  if (messages.empty()) throw ConfigError("conversation is empty");
  for (const auto& m : messages) {
    if (m.content.empty()) throw ConfigError("message content must not be empty");
  }
  if (messages.back().role != Role::User)
    throw ConfigError("conversation must end with a user message");
}

std::uint64_t estimate_tokens(std::string_view text) { return (text.size() + 3) / 4; }

namespace {

void split_base_url(const std::string& url, std::string& scheme_host_port, std::string& prefix) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("base_url needs a scheme: " + url);
  std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https")
    throw ConfigError("base_url scheme must be http or https: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  scheme_host_port = url.substr(0, path_start);
  prefix = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
}

bool retryable_status(int status) { return status == 408 || status == 429 || status >= 500; }

}  // namespace

HttpChatBackend::HttpChatBackend(BackendConfig config, std::string api_key)
    : config_(std::move(config)), api_key_(std::move(api_key)) {
  config_.validate();
  if (api_key_.empty()) throw ConfigError(std::string(kApiKeyEnv) + " is not set");
  split_base_url(config_.base_url, scheme_host_port_, path_prefix_);
}

std::unique_ptr<HttpChatBackend> HttpChatBackend::from_environment(BackendConfig config) {
  const char* key = std::getenv(kApiKeyEnv);
  if (key == nullptr || *key == '\0') {
    throw ConfigError(std::string(kApiKeyEnv) + " is not set; the HTTP backend needs an API key");
  }
  return std::make_unique<HttpChatBackend>(std::move(config), key);
}

std::string HttpChatBackend::request_body(std::span<const ChatMessage> messages) const {
  nlohmann::ordered_json body;
  body["model"] = config_.model;
  auto& msgs = body["messages"] = nlohmann::ordered_json::array();
  for (const auto& m : messages) {
    msgs.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  }
  body["temperature"] = config_.temperature;
  body["top_p"] = config_.top_p;
  if (config_.reasoning_effort) body["reasoning_effort"] = to_string(*config_.reasoning_effort);
  return body.dump(-1, ' ', false, nlohmann::ordered_json::error_handler_t::replace);
}

Completion HttpChatBackend::complete(std::span<const ChatMessage> messages) {
  check_conversation(messages);
  const std::string body = request_body(messages);
  const std::string path = path_prefix_ + "/chat/completions";

  httplib::Client client(scheme_host_port_);
  auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout);
  auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  httplib::Headers headers{{"Authorization", "Bearer " + api_key_}};

  std::string last_error;
  for (unsigned attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(config_.backoff_base * (1u << (attempt - 1)));
    ++attempts_;
    auto res = client.Post(path, headers, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 401 || res->status == 403) {
      throw BackendError("authentication failed (HTTP " + std::to_string(res->status) + ")");
    }
    if (retryable_status(res->status)) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw BackendError("HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
    }

    nlohmann::json reply;
    try {
      reply = nlohmann::json::parse(res->body);
      Completion out;
      out.reply = reply.at("choices").at(0).at("message").at("content").get<std::string>();
      if (auto u = reply.find("usage"); u != reply.end() && u->is_object()) {
        out.usage.input_tokens = u->value("prompt_tokens", std::uint64_t{0});
        out.usage.output_tokens = u->value("completion_tokens", std::uint64_t{0});
      }
      return out;
    } catch (const nlohmann::json::exception& e) {
      throw BackendError(std::string("malformed completion response: ") + e.what());
    }
  }
  throw BackendError("request failed after " + std::to_string(config_.max_retries + 1) +
                     " attempts: " + last_error);
}

}  // namespace diffsense
