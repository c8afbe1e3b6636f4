#include "cicdor/discovery/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include <json.hpp>

namespace cicdor::discovery {

std::string normalize_name(const std::string& name) {
  std::string out;
  bool space = false;
  for (const char ch : name) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isspace(c)) {
      space = !out.empty();
      continue;
    }
    if (space) out.push_back(' ');
    space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

namespace {

std::string one_line(const std::string& s) {
  std::string out = s;
  std::replace(out.begin(), out.end(), '\n', ' ');
  std::replace(out.begin(), out.end(), '\r', ' ');
  return out;
}

void write_samples(std::ostringstream& os, const std::vector<Review>& samples) {
  for (const auto& r : samples) os << "- (rating " << r.rating << ") " << one_line(r.text) << '\n';
}

void write_names(std::ostringstream& os, const std::vector<std::string>& names) {
  if (names.empty()) os << "(none)\n";
  for (const auto& n : names) os << "- " << n << '\n';
}

const char* kConfounderInstructions =
    "1. Write a brief description of each variable.\n"
    "2. Classify each variable into one of two categories: (a) item intrinsic attributes or explicit user "
    "preferences; (b) marketing, service, or other external factors. Variables in category (b) are more likely "
    "to be confounders; variables in category (a) usually describe user preferences themselves.\n"
    "3. Reason step by step about each variable. A variable is a confounder only if it both directly affects "
    "user-item interactions and indirectly affects them by influencing user preferences.\n";

const char* kConfounderFormat =
    "## Output format control\n"
    "Return one JSON object and nothing else:\n"
    "{\"confounders\": [{\"name\": \"...\", \"description\": \"...\", \"reasoning\": \"...\"}], "
    "\"non_confounders\": [{\"name\": \"...\", \"reasoning\": \"...\"}]}\n";

// Outermost bracketed JSON value of the given kind in free text.
nlohmann::json find_json(const std::string& reply, char open, char close) {
  const auto first = reply.find(open);
  const auto last = reply.rfind(close);
  if (first == std::string::npos || last == std::string::npos || last < first) {
    throw ParseError("no JSON " + std::string(open == '[' ? "array" : "object") + " in reply");
  }
  try {
    return nlohmann::json::parse(reply.substr(first, last - first + 1));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed JSON in reply: ") + e.what());
  }
}

std::string field(const nlohmann::json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j.at(key).is_string()) {
    throw ParseError(std::string("entry without string field '") + key + "'");
  }
  return j.at(key).get<std::string>();
}

}  // namespace

std::string proposal_prompt(const std::string& domain, const std::vector<Review>& samples) {
  std::ostringstream os;
  os << "You are analysing user reviews from the " << domain << " domain. Every reviewer interacted with "
     << "the item; ratings of 4 or 5 count as positive interactions.\n\n";
  os << kReviewSamplesHeading << '\n';
  write_samples(os, samples);
  os << "\n## Task instructions\n"
     << "1. Consider which factors mentioned in the reviews may influence whether a user interacts with an item.\n"
     << "2. Filter the factors so that each one is semantically distinct and none is redundant.\n"
     << "3. Output the filtered factors as causal variables. For each, give a name and a criterion stating "
     << "when its value is 1 (positive case), -1 (negative case), and 0 (otherwise or not mentioned).\n\n"
     << "## Output format control\n"
     << "Return a JSON array and nothing else: [{\"name\": \"...\", \"criterion\": \"...\"}]\n";
  return os.str();
}

std::string feedback_prompt(const std::string& previous, const std::vector<Review>& samples,
                            const std::vector<std::string>& refined,
                            const std::vector<std::string>& already_proposed) {
  std::ostringstream os;
  os << previous << '\n' << kFeedbackSamplesHeading << '\n';
  write_samples(os, samples);
  os << '\n' << kRefinedHeading << '\n';
  write_names(os, refined);
  os << '\n' << kAlreadyProposedHeading << '\n';
  write_names(os, already_proposed);
  os << "\nThe refined variables do not yet explain these reviews. Propose new variables that are not among "
     << "the refined or already proposed variables, using the same output format.\n";
  return os.str();
}

std::string format_reminder(const std::string& prompt, bool json_object) {
  return prompt + "\nYour previous reply could not be parsed. Reply with a single JSON " +
         (json_object ? "object" : "array") + " exactly as specified, with no other text.\n";
}

std::string annotation_prompt(const std::string& domain, const CausalVariable& variable, const Review& review) {
  std::ostringstream os;
  os << "Annotate one " << domain << " review against one causal variable.\n\n"
     << kVariableHeading << "\nName: " << variable.name << "\nCriterion: " << one_line(variable.criterion)
     << "\n\n"
     << kReviewHeading << '\n'
     << one_line(review.text) << "\n\n"
     << "## Output format control\nReply with exactly one of 1, -1 or 0.\n";
  return os.str();
}

std::string extraction_prompt(const std::string& domain, const std::vector<CausalVariable>& refined,
                              const std::optional<ExtractionExamples>& examples) {
  std::ostringstream os;
  os << kInputHeading << "\nDomain: " << domain << "\nRefined variables:\n";
  for (const auto& v : refined) os << "- " << v.name << ": " << one_line(v.criterion) << '\n';
  os << "\n## Task instructions\n" << kConfounderInstructions;
  if (examples) {
    os << '\n' << kExamplesHeading << '\n'
       << "Confounder example:\n"
       << "  name: " << examples->positive.name << "\n  description: " << one_line(examples->positive.description)
       << "\n  reasoning: " << one_line(examples->positive.reasoning) << '\n';
    if (examples->negative) {
      os << "Non-confounder example:\n"
         << "  name: " << examples->negative->name << "\n  reasoning: " << one_line(examples->negative->reasoning)
         << '\n';
    }
  }
  os << '\n' << kConfounderFormat;
  return os.str();
}

std::string direct_prompt(const std::string& domain, const std::vector<Review>& reviews) {
  std::ostringstream os;
  os << "Domain: " << domain << "\n\n" << kRawReviewsHeading << '\n';
  write_samples(os, reviews);
  os << "\n## Task instructions\nIdentify the factors these reviews mention, then decide which are "
     << "confounders.\n"
     << kConfounderInstructions << '\n'
     << kConfounderFormat;
  return os.str();
}

std::vector<ProposedVariable> parse_proposal(const std::string& reply) {
  const auto j = find_json(reply, '[', ']');
  if (!j.is_array()) throw ParseError("proposal reply is not an array");
  std::vector<ProposedVariable> out;
  for (const auto& e : j) out.push_back({field(e, "name"), field(e, "criterion")});
  return out;
}

std::optional<int> parse_annotation(const std::string& reply) {
  std::string s;
  for (const char c : reply)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s == "1" || s == "+1") return 1;
  if (s == "-1") return -1;
  if (s == "0") return 0;
  return std::nullopt;
}

ExtractionReply parse_extraction(const std::string& reply) {
  const auto j = find_json(reply, '{', '}');
  if (!j.is_object() || !j.contains("confounders") || !j.at("confounders").is_array()) {
    throw ParseError("extraction reply lacks a confounders array");
  }
  ExtractionReply out;
  for (const auto& e : j.at("confounders")) {
    out.confounders.push_back({field(e, "name"), field(e, "description"), field(e, "reasoning"), 0});
  }
  if (j.contains("non_confounders") && j.at("non_confounders").is_array()) {
    for (const auto& e : j.at("non_confounders")) out.non_confounders.push_back({field(e, "name"), field(e, "reasoning")});
  }
  return out;
}

}  // namespace cicdor::discovery
