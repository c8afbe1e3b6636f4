#include "cicdor/discovery/llm.hpp"

#include <atomic>
#include <cstdio>
#include <exception>
#include <istream>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "cicdor/representation/text_encoder.hpp"

namespace cicdor::discovery {

std::string prompt_hash(const std::string& prompt) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(representation::fnv1a(prompt)));
  return buf;
}

void ReplayLog::append(const ReplayEntry& e) {
  const nlohmann::json j{{"round", e.round},
                         {"step", e.step},
                         {"prompt_hash", e.prompt_hash},
                         {"prompt", e.prompt},
                         {"reply", e.reply}};
  const std::lock_guard lock(mu_);
  out_ << j.dump() << '\n';
}

std::vector<ReplayEntry> read_replay(std::istream& in) {
  std::vector<ReplayEntry> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      out.push_back({j.at("round").get<int>(), j.at("step").get<std::string>(),
                     j.at("prompt_hash").get<std::string>(), j.at("prompt").get<std::string>(),
                     j.at("reply").get<std::string>()});
    } catch (const nlohmann::json::exception& e) {
      throw LlmError("replay log line " + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

ReplayLlm::ReplayLlm(const std::vector<ReplayEntry>& entries, std::string model) : model_(std::move(model)) {
  for (const auto& e : entries) {
    if (prompt_hash(e.prompt) != e.prompt_hash) {
      throw LlmError("replay entry for step '" + e.step + "' has a stale prompt hash");
    }
    replies_.emplace(e.prompt, e.reply);
  }
}

std::string ReplayLlm::complete(const std::string& prompt, double) {
  const auto it = replies_.find(prompt);
  if (it == replies_.end()) throw LlmError("no recorded reply for prompt " + prompt_hash(prompt));
  return it->second;
}

HttpChatLlm::HttpChatLlm(transport::Endpoint endpoint, std::string model)
    : endpoint_(std::move(endpoint)), model_(std::move(model)) {
  if (endpoint_.path.empty()) endpoint_.path = "/v1/chat/completions";
}

std::string HttpChatLlm::complete(const std::string& prompt, double temperature) {
  const nlohmann::json body{{"model", model_},
                            {"temperature", temperature},
                            {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})}};
  try {
    const auto reply = transport::post_json(endpoint_, body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const transport::TransportError& e) {
    throw LlmError(std::string("chat completion failed: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw LlmError(std::string("chat completion reply malformed: ") + e.what());
  }
}

std::string LlmSession::call(int round, const std::string& step, const std::string& prompt) {
  std::string reply = port_.complete(prompt, 0.0);
  if (log_) log_->append({round, step, prompt_hash(prompt), prompt, reply});
  return reply;
}

std::vector<std::string> LlmSession::call_batch(int round, const std::string& step,
                                                const std::vector<std::string>& prompts) {
  std::vector<std::string> replies(prompts.size());
  const std::size_t workers = std::min(parallelism_, prompts.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < prompts.size(); ++i) replies[i] = port_.complete(prompts[i], 0.0);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < prompts.size(); i = next++) replies[i] = port_.complete(prompts[i], 0.0);
        } catch (...) {
          errors[w] = std::current_exception();
          next = prompts.size();
        }
      });
    }
    for (auto& t : threads) t.join();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  if (log_) {
    for (std::size_t i = 0; i < prompts.size(); ++i)
      log_->append({round, step, prompt_hash(prompts[i]), prompts[i], replies[i]});
  }
  return replies;
}

}  // namespace cicdor::discovery
