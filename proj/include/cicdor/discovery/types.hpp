#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cicdor::discovery {

/// Lowercase, trimmed, inner whitespace collapsed to single spaces.
std::string normalize_name(const std::string& name);

struct CausalVariable {
  std::string name;       // normalized
  std::string criterion;  // what makes the value 1, -1 or 0
  int round_proposed = 0;
};

struct Review {
  std::string id;
  int rating = 0;
  std::string text;
};

struct ReviewCorpus {
  std::string domain;
  std::vector<Review> reviews;
};

/// Reviews as rows, variables as columns; q[j][i] is review i against variable j.
struct AnnotationMatrix {
  std::vector<std::string> review_ids;
  std::vector<std::string> variables;
  std::vector<std::vector<int>> q;
  std::vector<int> y;
};

struct ConfounderEntry {
  std::string name;
  std::string description;
  std::string reasoning;
  int round = 0;
};

struct NonConfounder {
  std::string name;
  std::string reasoning;
};

struct ExtractionReply {
  std::vector<ConfounderEntry> confounders;
  std::vector<NonConfounder> non_confounders;
};

/// A reply that does not follow the requested output format.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cicdor::discovery
