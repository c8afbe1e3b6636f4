#pragma once

#include <string>
#include <vector>

#include "cicdor/discovery/llm.hpp"

namespace cicdor::discovery {

struct PlantedVariable {
  std::string name;
  std::string criterion;
  std::vector<std::string> positive_phrases;  // lowercase substrings that mean value 1
  std::vector<std::string> negative_phrases;  // ... value -1
  char category = 'a';  // 'a' intrinsic attribute or preference, 'b' external factor
};

struct MockWorld {
  std::vector<PlantedVariable> variables;
  std::size_t max_per_proposal = 4;
};

/// Deterministic stand-in for a language model. The reply is a pure function
/// of the prompt: the task is recognised from the prompt's section headings,
/// and planted variables are found in review text by phrase matching.
///  - proposal: up to max_per_proposal planted variables mentioned in the
///    samples, most mentioned first, skipping names the prompt excludes;
///  - annotation: 1 / -1 / 0 by positive / negative / no phrase match;
///  - extraction: category (b) variables are confounders, the rest are not;
///  - direct extraction: every mentioned category (b) variable.
class MockLlm : public LlmPort {
 public:
  explicit MockLlm(MockWorld world) : world_(std::move(world)) {}
  std::string complete(const std::string& prompt, double temperature) override;
  std::string model_name() const override { return "mock-llm"; }
  const MockWorld& world() const { return world_; }

 private:
  std::string propose(const std::string& prompt) const;
  std::string annotate(const std::string& prompt) const;
  std::string extract(const std::string& prompt) const;
  std::string direct(const std::string& prompt) const;
  const PlantedVariable* find(const std::string& name) const;
  int value_in(const PlantedVariable& v, const std::string& text) const;

  MockWorld world_;
};

}  // namespace cicdor::discovery
