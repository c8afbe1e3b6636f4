#include "cicdor/discovery/mock_llm.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cicdor/discovery/prompts.hpp"
#include "cicdor/discovery/types.hpp"

namespace cicdor::discovery {
namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool starts_with(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

// Lines of each "## " section, keyed by heading. Repeated headings append.
std::vector<std::pair<std::string, std::string>> sectioned_lines(const std::string& prompt) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in(prompt);
  std::string line;
  std::string heading;
  while (std::getline(in, line)) {
    if (starts_with(line, "## ")) {
      heading = line;
      continue;
    }
    out.emplace_back(heading, line);
  }
  return out;
}

// Review text from a "- (rating N) text" sample line.
std::string sample_text(const std::string& line) {
  const auto close = line.find(") ");
  return close == std::string::npos ? line.substr(2) : line.substr(close + 2);
}

std::string reasoning_for(const PlantedVariable& v) {
  if (v.category == 'b') {
    return "Category (b), an external factor. " + v.name +
           " shapes what users come to prefer and also directly drives whether they interact, so it "
           "affects interactions both directly and through preferences.";
  }
  return "Category (a), an intrinsic attribute or explicit preference. " + v.name +
         " is part of the preference itself rather than a common cause of preference and interaction.";
}

}  // namespace

std::string MockLlm::complete(const std::string& prompt, double) {
  if (prompt.find(kVariableHeading + std::string("\n")) != std::string::npos &&
      prompt.find(kReviewHeading + std::string("\n")) != std::string::npos) {
    return annotate(prompt);
  }
  if (prompt.find(kInputHeading) != std::string::npos) return extract(prompt);
  if (prompt.find(kRawReviewsHeading) != std::string::npos) return direct(prompt);
  if (prompt.find(kReviewSamplesHeading) != std::string::npos) return propose(prompt);
  return "I am not sure what you are asking.";
}

const PlantedVariable* MockLlm::find(const std::string& name) const {
  const auto key = normalize_name(name);
  for (const auto& v : world_.variables)
    if (normalize_name(v.name) == key) return &v;
  return nullptr;
}

int MockLlm::value_in(const PlantedVariable& v, const std::string& text) const {
  const auto t = lower(text);
  for (const auto& p : v.positive_phrases)
    if (t.find(p) != std::string::npos) return 1;
  for (const auto& p : v.negative_phrases)
    if (t.find(p) != std::string::npos) return -1;
  return 0;
}

std::string MockLlm::propose(const std::string& prompt) const {
  std::vector<std::string> samples;
  std::set<std::string> excluded;
  for (const auto& [heading, line] : sectioned_lines(prompt)) {
    if (!starts_with(line, "- ")) continue;
    if (heading == kReviewSamplesHeading || heading == kFeedbackSamplesHeading) {
      samples.push_back(sample_text(line));
    } else if (heading == kRefinedHeading || heading == kAlreadyProposedHeading) {
      excluded.insert(normalize_name(line.substr(2)));
    }
  }
  std::vector<std::pair<int, std::size_t>> ranked;  // (-mentions, world order)
  for (std::size_t i = 0; i < world_.variables.size(); ++i) {
    const auto& v = world_.variables[i];
    if (excluded.count(normalize_name(v.name))) continue;
    int mentions = 0;
    for (const auto& s : samples) mentions += value_in(v, s) != 0;
    if (mentions > 0) ranked.emplace_back(-mentions, i);
  }
  std::sort(ranked.begin(), ranked.end());
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t r = 0; r < ranked.size() && r < world_.max_per_proposal; ++r) {
    const auto& v = world_.variables[ranked[r].second];
    out.push_back({{"name", v.name}, {"criterion", v.criterion}});
  }
  return out.dump();
}

std::string MockLlm::annotate(const std::string& prompt) const {
  std::string name;
  std::string review;
  for (const auto& [heading, line] : sectioned_lines(prompt)) {
    if (heading == kVariableHeading && starts_with(line, "Name: ")) name = line.substr(6);
    if (heading == kReviewHeading && !line.empty()) review += line + ' ';
  }
  const auto* v = find(name);
  return std::to_string(v ? value_in(*v, review) : 0);
}

std::string MockLlm::extract(const std::string& prompt) const {
  nlohmann::json conf = nlohmann::json::array();
  nlohmann::json non = nlohmann::json::array();
  bool in_list = false;
  for (const auto& [heading, line] : sectioned_lines(prompt)) {
    if (heading != kInputHeading) continue;
    if (line == "Refined variables:") {
      in_list = true;
      continue;
    }
    if (!in_list || !starts_with(line, "- ")) continue;
    const auto colon = line.find(':', 2);
    const std::string name = line.substr(2, colon == std::string::npos ? std::string::npos : colon - 2);
    const auto* v = find(name);
    if (v && v->category == 'b') {
      conf.push_back({{"name", v->name}, {"description", v->criterion}, {"reasoning", reasoning_for(*v)}});
    } else {
      non.push_back({{"name", name}, {"reasoning", v ? reasoning_for(*v) : "Not recognised as a common cause."}});
    }
  }
  return nlohmann::json{{"confounders", conf}, {"non_confounders", non}}.dump();
}

std::string MockLlm::direct(const std::string& prompt) const {
  std::vector<std::string> reviews;
  for (const auto& [heading, line] : sectioned_lines(prompt))
    if (heading == kRawReviewsHeading && starts_with(line, "- ")) reviews.push_back(sample_text(line));
  nlohmann::json conf = nlohmann::json::array();
  nlohmann::json non = nlohmann::json::array();
  for (const auto& v : world_.variables) {
    const bool mentioned =
        std::any_of(reviews.begin(), reviews.end(), [&](const std::string& r) { return value_in(v, r) != 0; });
    if (!mentioned) continue;
    if (v.category == 'b') {
      conf.push_back({{"name", v.name}, {"description", v.criterion}, {"reasoning", reasoning_for(v)}});
    } else {
      non.push_back({{"name", v.name}, {"reasoning", reasoning_for(v)}});
    }
  }
  return nlohmann::json{{"confounders", conf}, {"non_confounders", non}}.dump();
}

}  // namespace cicdor::discovery
