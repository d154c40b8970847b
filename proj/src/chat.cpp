#include "lgpl/chat.hpp"

#include <cstdlib>
#include <fstream>

#include <httplib.h>

#include "lgpl/hash.hpp"

namespace lgpl {

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // without trailing slash
};

SplitUrl split_url(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw LlmTransportError("endpoint URL lacks a scheme: " + url);
  const auto slash = url.find('/', scheme + 3);
  SplitUrl out;
  out.origin = url.substr(0, slash);
  out.path = slash == std::string::npos ? "" : url.substr(slash);
  while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
  return out;
}

}  // namespace

nlohmann::json messages_to_json(std::span<const ChatMessage> messages) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& m : messages) arr.push_back({{"role", m.role}, {"content", m.content}});
  return arr;
}

HttpChatProvider::HttpChatProvider(ChatEndpointConfig config) : config_(std::move(config)) {}

std::string HttpChatProvider::complete(std::span<const ChatMessage> messages) {
  const SplitUrl url = split_url(config_.base_url);
  httplib::Client client(url.origin);
  const auto seconds = static_cast<time_t>(config_.timeout_seconds);
  client.set_connection_timeout(seconds, 0);
  client.set_read_timeout(seconds, 0);

  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env_var.c_str()); key != nullptr && *key != '\0') {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  const nlohmann::json body = {{"model", config_.model_name},
                               {"messages", messages_to_json(messages)},
                               {"temperature", config_.temperature}};

  auto res = client.Post(url.path + "/chat/completions", headers, body.dump(), "application/json");
  if (!res) {
    throw LlmTransportError("chat endpoint unreachable: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw LlmTransportError("chat endpoint returned HTTP " + std::to_string(res->status) + ": " +
                            res->body.substr(0, 500));
  }
  try {
    const auto reply = nlohmann::json::parse(res->body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw LlmTransportError(std::string("unexpected chat completion payload: ") + e.what());
  }
}

MockChatProvider::MockChatProvider(const nlohmann::json& fixture) {
  if (fixture.contains("by_hash")) {
    by_hash_ = fixture.at("by_hash").get<std::map<std::string, std::string>>();
  }
  if (fixture.contains("sequence")) {
    sequence_ = fixture.at("sequence").get<std::vector<std::string>>();
  }
}

MockChatProvider MockChatProvider::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mock LLM fixture " + path.string());
  return MockChatProvider(nlohmann::json::parse(in));
}

std::string MockChatProvider::request_key(std::span<const ChatMessage> messages) {
  return to_hex(stable_hash(messages_to_json(messages).dump()));
}

std::string MockChatProvider::complete(std::span<const ChatMessage> messages) {
  const std::string key = request_key(messages);
  std::lock_guard lock(mutex_);
  ++calls_;
  if (const auto it = by_hash_.find(key); it != by_hash_.end()) return it->second;
  if (next_ < sequence_.size()) return sequence_[next_++];
  throw LlmTransportError("mock LLM fixture has no response for request " + key);
}

std::size_t MockChatProvider::calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

}  // namespace lgpl
