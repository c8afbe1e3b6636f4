#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cicdor/discovery/types.hpp"

namespace cicdor::discovery {

// Section headings shared by the renderers and the mock model.
inline constexpr const char* kReviewSamplesHeading = "## Review samples";
inline constexpr const char* kFeedbackSamplesHeading = "## Additional review samples";
inline constexpr const char* kAlreadyProposedHeading = "## Already proposed variables";
inline constexpr const char* kRefinedHeading = "## Refined variables";
inline constexpr const char* kVariableHeading = "## Variable";
inline constexpr const char* kReviewHeading = "## Review";
inline constexpr const char* kInputHeading = "## Input data and context";
inline constexpr const char* kRawReviewsHeading = "## Raw reviews";
inline constexpr const char* kExamplesHeading = "## Examples";

struct ProposedVariable {
  std::string name;
  std::string criterion;
};

/// Proposal prompt: review samples, task instructions, output format control.
std::string proposal_prompt(const std::string& domain, const std::vector<Review>& samples);

/// The previous proposal prompt extended with new samples and the names the
/// model must not propose again.
std::string feedback_prompt(const std::string& previous, const std::vector<Review>& samples,
                            const std::vector<std::string>& refined,
                            const std::vector<std::string>& already_proposed);

/// Appended to a prompt whose reply could not be parsed.
std::string format_reminder(const std::string& prompt, bool json_object);

std::string annotation_prompt(const std::string& domain, const CausalVariable& variable, const Review& review);

struct ExtractionExamples {
  ConfounderEntry positive;
  std::optional<NonConfounder> negative;
};

/// Confounder extraction over the refined variables; zero-shot when
/// `examples` is empty.
std::string extraction_prompt(const std::string& domain, const std::vector<CausalVariable>& refined,
                              const std::optional<ExtractionExamples>& examples);

/// Single-shot confounder extraction straight from raw reviews.
std::string direct_prompt(const std::string& domain, const std::vector<Review>& reviews);

/// Expects a JSON array of {"name", "criterion"} somewhere in the reply.
std::vector<ProposedVariable> parse_proposal(const std::string& reply);

/// 1, -1 or 0 (surrounding whitespace and a leading '+' allowed); anything
/// else is nullopt.
std::optional<int> parse_annotation(const std::string& reply);

/// Expects a JSON object {"confounders": [...], "non_confounders": [...]}.
ExtractionReply parse_extraction(const std::string& reply);

}  // namespace cicdor::discovery
