#include "sonochain/chat.hpp"

#include <cstdlib>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace sonochain {

HttpChatClient::HttpChatClient(std::string endpoint, std::string model,
                               std::chrono::milliseconds timeout)
    : endpoint_(std::move(endpoint)),
      model_(std::move(model)),
      timeout_(timeout) {
  if (endpoint_.empty()) throw ConfigError("chat client requires an endpoint");
}

std::string HttpChatClient::complete(const std::vector<ChatTurn>& messages) {
  nlohmann::json body;
  if (!model_.empty()) body["model"] = model_;
  body["messages"] = nlohmann::json::array();
  for (const auto& turn : messages)
    body["messages"].push_back({{"role", turn.role}, {"content", turn.content}});

  httplib::Client client(endpoint_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  if (const char* key = std::getenv("SONOCHAIN_LLM_KEY"))
    client.set_default_headers({{"Authorization", std::string("Bearer ") + key}});

  auto res = client.Post("/v1/chat", body.dump(), "application/json");
  if (!res)
    throw BackendUnavailableError("chat endpoint unreachable: " + endpoint_);
  if (res->status != 200)
    throw BackendUnavailableError("chat endpoint returned status " +
                                  std::to_string(res->status));
  try {
    return nlohmann::json::parse(res->body).at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("malformed chat response: ") + e.what());
  }
}

ScriptedChatClient::ScriptedChatClient(std::vector<std::string> replies)
    : replies_(replies.begin(), replies.end()) {}

std::string ScriptedChatClient::complete(const std::vector<ChatTurn>& messages) {
  std::lock_guard lock(mutex_);
  requests_.push_back(messages);
  if (replies_.empty())
    throw BackendUnavailableError("scripted chat transcript exhausted");
  std::string reply = std::move(replies_.front());
  replies_.pop_front();
  return reply;
}

}  // namespace sonochain
