#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace lgpl {

struct ChatMessage {
  std::string role;  // "system", "user" or "assistant"
  std::string content;
};

struct ChatEndpointConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string model_name = "gpt-4";
  std::string api_key_env_var = "OPENAI_API_KEY";
  double timeout_seconds = 60.0;
  std::size_t max_retries = 2;
  double temperature = 0.7;
};

/// Network or protocol failure while talking to the completion endpoint.
class LlmTransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The completion arrived but did not contain what was asked for.
class LlmParseError : public std::runtime_error {
 public:
  LlmParseError(const std::string& what, std::string offending_text)
      : std::runtime_error(what), text_(std::move(offending_text)) {}
  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

class LlmRetriesExhausted : public std::runtime_error {
 public:
  LlmRetriesExhausted(const std::string& what, std::string last_response)
      : std::runtime_error(what), last_response_(std::move(last_response)) {}
  const std::string& last_response() const { return last_response_; }

 private:
  std::string last_response_;
};

class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  /// Returns the assistant's reply text. Throws LlmTransportError.
  virtual std::string complete(std::span<const ChatMessage> messages) = 0;
};

/// POST {base_url}/chat/completions with an OpenAI-style body; the bearer
/// token is read from the configured environment variable at call time.
class HttpChatProvider : public ChatProvider {
 public:
  explicit HttpChatProvider(ChatEndpointConfig config);
  std::string complete(std::span<const ChatMessage> messages) override;

 private:
  ChatEndpointConfig config_;
};

/// Replays canned completions from a fixture:
///
///   {"by_hash": {"<request key>": "text", ...}, "sequence": ["text", ...]}
///
/// A request whose key (see request_key) appears in by_hash gets that text;
/// otherwise the next unused sequence entry is returned. Running out of
/// entries is reported as a transport error.
class MockChatProvider : public ChatProvider {
 public:
  explicit MockChatProvider(const nlohmann::json& fixture);
  static MockChatProvider from_file(const std::filesystem::path& path);

  std::string complete(std::span<const ChatMessage> messages) override;

  /// Hex FNV-1a of the request's messages serialized as a JSON array of
  /// {"role", "content"} objects.
  static std::string request_key(std::span<const ChatMessage> messages);

  std::size_t calls() const;

 private:
  std::map<std::string, std::string> by_hash_;
  std::vector<std::string> sequence_;
  mutable std::mutex mutex_;
  std::size_t next_ = 0;
  std::size_t calls_ = 0;
};

nlohmann::json messages_to_json(std::span<const ChatMessage> messages);

}  // namespace lgpl
