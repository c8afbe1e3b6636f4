#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "cicdor/transport/http_json.hpp"

namespace cicdor::discovery {

class LlmError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Text in, text out. Implementations must be safe to call from several
/// threads at once.
class LlmPort {
 public:
  virtual ~LlmPort() = default;
  virtual std::string complete(const std::string& prompt, double temperature) = 0;
  virtual std::string model_name() const = 0;
};

/// Lowercase hex FNV-1a of the prompt bytes.
std::string prompt_hash(const std::string& prompt);

struct ReplayEntry {
  int round = 0;
  std::string step;
  std::string prompt_hash;
  std::string prompt;
  std::string reply;
};

/// JSONL log of every call: {round, step, prompt_hash, prompt, reply}.
class ReplayLog {
 public:
  explicit ReplayLog(std::ostream& out) : out_(out) {}
  void append(const ReplayEntry& e);

 private:
  std::ostream& out_;
  std::mutex mu_;
};

std::vector<ReplayEntry> read_replay(std::istream& in);

/// Answers from a recorded log; an unknown prompt is an LlmError.
class ReplayLlm : public LlmPort {
 public:
  explicit ReplayLlm(const std::vector<ReplayEntry>& entries, std::string model = "replay");
  std::string complete(const std::string& prompt, double temperature) override;
  std::string model_name() const override { return model_; }

 private:
  std::map<std::string, std::string> replies_;
  std::string model_;
};

/// Chat-completions style endpoint: POST {"model", "temperature", "messages"}
/// and read choices[0].message.content. The key comes from the environment
/// variable named in the endpoint.
class HttpChatLlm : public LlmPort {
 public:
  HttpChatLlm(transport::Endpoint endpoint, std::string model);
  std::string complete(const std::string& prompt, double temperature) override;
  std::string model_name() const override { return model_; }

 private:
  transport::Endpoint endpoint_;
  std::string model_;
};

/// Pipeline-facing wrapper: temperature 0 and every call logged in order.
class LlmSession {
 public:
  explicit LlmSession(LlmPort& port, ReplayLog* log = nullptr, std::size_t parallelism = 1)
      : port_(port), log_(log), parallelism_(parallelism == 0 ? 1 : parallelism) {}

  std::string call(int round, const std::string& step, const std::string& prompt);

  /// Issues the prompts on up to `parallelism` threads; replies come back and
  /// are logged in prompt order.
  std::vector<std::string> call_batch(int round, const std::string& step,
                                      const std::vector<std::string>& prompts);

  LlmPort& port() { return port_; }

 private:
  LlmPort& port_;
  ReplayLog* log_;
  std::size_t parallelism_;
};

}  // namespace cicdor::discovery
