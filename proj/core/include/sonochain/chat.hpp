#pragma once

#include <chrono>
#include <deque>
#include <mutex>
#include <string>
#include <vector>

#include "sonochain/errors.hpp"

namespace sonochain {

struct ChatTurn {
  std::string role;  // system | user | assistant
  std::string content;
};

// Chat-completion transport used by the LLM planner and final summarizer.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual std::string complete(const std::vector<ChatTurn>& messages) = 0;
};

// POSTs {model, messages:[{role, content}...]} and expects {content}.
// The API key is read from the SONOCHAIN_LLM_KEY environment variable.
class HttpChatClient : public ChatClient {
 public:
  HttpChatClient(std::string endpoint, std::string model = "",
                 std::chrono::milliseconds timeout = std::chrono::seconds(30));

  std::string complete(const std::vector<ChatTurn>& messages) override;

 private:
  std::string endpoint_;
  std::string model_;
  std::chrono::milliseconds timeout_;
};

// Replays a fixed list of assistant replies; records every request.
// Offline stand-in for planner and summarizer transcripts.
class ScriptedChatClient : public ChatClient {
 public:
  explicit ScriptedChatClient(std::vector<std::string> replies);

  std::string complete(const std::vector<ChatTurn>& messages) override;

  const std::vector<std::vector<ChatTurn>>& requests() const {
    return requests_;
  }

 private:
  std::mutex mutex_;
  std::deque<std::string> replies_;
  std::vector<std::vector<ChatTurn>> requests_;
};

}  // namespace sonochain
