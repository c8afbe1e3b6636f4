#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cicdor/data/corpus.hpp"
#include "cicdor/discovery/llm.hpp"
#include "cicdor/discovery/prompts.hpp"
#include "cicdor/discovery/types.hpp"
#include "cicdor/numerics/matrix.hpp"
#include "cicdor/representation/text_encoder.hpp"

namespace cicdor::discovery {

/// Up to `max_users` users (first by id after a seeded shuffle) with at most
/// `per_user` of their reviewed events each. Events without review text are
/// skipped.
ReviewCorpus review_corpus(const data::InteractionCorpus& corpus, std::uint64_t seed,
                           std::size_t max_users = 1000, std::size_t per_user = 5);

/// Groups reviews by rating 1..5 and samples `per_group` from each
/// non-empty group.
std::vector<Review> sample_reviews(const ReviewCorpus& corpus, std::uint64_t seed, std::size_t per_group = 3);

struct ProposalOutcome {
  std::vector<CausalVariable> added;  // new names only, in reply order
  std::size_t duplicates = 0;
  std::string raw_reply;
};

/// Sends the prompt, parses, and drops names already in `existing`. A reply
/// that cannot be parsed is retried once with a format reminder.
ProposalOutcome propose_variables(LlmSession& llm, int round, const std::string& prompt,
                                  const std::vector<CausalVariable>& existing);

struct AnnotationOutcome {
  std::vector<std::vector<int>> columns;  // one per new variable, one entry per review
  std::size_t calls = 0;
  std::size_t coerced = 0;  // replies outside {-1, 0, 1}, recorded as 0
};

/// Annotates every review against every new variable. More than
/// `max_coerced_rate` of malformed replies is an error.
AnnotationOutcome annotate_reviews(LlmSession& llm, int round, const ReviewCorpus& corpus,
                                   const std::vector<CausalVariable>& variables, double max_coerced_rate = 0.05);

/// Target column: 1 when the review's rating is at least 4.
std::vector<int> review_labels(const ReviewCorpus& corpus);

struct Refinement {
  std::vector<std::size_t> filtered;   // variable indices kept by the CI filter
  std::vector<std::size_t> blanket;    // Markov blanket of the target, variable indices
  std::vector<std::size_t> pool;       // every other proposed variable
  std::size_t degenerate_tests = 0;
};

Refinement refine_variables(const AnnotationMatrix& q, double alpha = 0.05, std::size_t max_condition = 3);

struct ConfounderPool {
  std::vector<ConfounderEntry> entries;
  bool contains(const std::string& name) const;
};

struct ExtractionOutcome {
  std::vector<ConfounderEntry> added;
  std::vector<NonConfounder> non_confounders;
  std::string prompt;
};

/// Zero-shot while the pool is empty; afterwards one positive example (the
/// first pool entry) and one negative example drawn from `negatives`.
ExtractionOutcome extract_confounders(LlmSession& llm, int round, const std::string& domain,
                                      const std::vector<CausalVariable>& blanket, const ConfounderPool& pool,
                                      const std::vector<NonConfounder>& negatives, std::uint64_t seed);

struct FeedbackOutcome {
  std::vector<Review> samples;
  std::vector<double> cluster_entropy;  // bits, one per cluster
  std::size_t chosen_cluster = 0;
  std::size_t clusters = 0;
  bool clusters_reduced = false;  // fewer rows than requested clusters
  double max_entropy = 0.0;
};

/// Clusters the reviews on the blanket columns and samples up to
/// `sample_size` reviews from the cluster with the highest H(y | blanket).
FeedbackOutcome causal_feedback(const AnnotationMatrix& q, const std::vector<std::size_t>& blanket,
                                const ReviewCorpus& corpus, std::uint64_t seed, std::size_t clusters = 5,
                                std::size_t sample_size = 15);

struct DiscoveryOptions {
  int max_rounds = 3;
  std::uint64_t seed = 0;
  std::size_t per_group = 3;
  std::size_t feedback_samples = 15;
  std::size_t clusters = 5;
  double alpha = 0.05;
  std::size_t max_condition = 3;
  double entropy_stop = 0.05;  // bits
  double max_coerced_rate = 0.05;
};

struct RoundTrace {
  int round = 0;
  std::vector<std::string> proposed;
  std::vector<std::string> filtered;
  std::vector<std::string> blanket;
  std::vector<std::string> new_confounders;
  double max_entropy = 0.0;
  std::size_t coerced = 0;
  std::size_t degenerate_tests = 0;
};

struct DiscoveryResult {
  std::vector<CausalVariable> variables;
  AnnotationMatrix q;
  Refinement refinement;
  ConfounderPool pool;
  std::vector<RoundTrace> rounds;
  bool converged = false;
};

/// A failed step. Carries the confounders found before the failure.
class DiscoveryError : public std::runtime_error {
 public:
  DiscoveryError(int round, std::string step, const std::string& what, ConfounderPool partial);
  int round() const { return round_; }
  const std::string& step() const { return step_; }
  const ConfounderPool& partial_pool() const { return partial_; }

 private:
  int round_;
  std::string step_;
  ConfounderPool partial_;
};

/// Iterates propose, annotate, refine, extract and feedback until the
/// blanket repeats, the worst cluster entropy falls below the threshold, or
/// max_rounds is reached.
DiscoveryResult run_discovery(const ReviewCorpus& corpus, LlmSession& llm, const DiscoveryOptions& options = {});

/// Baseline: one extraction prompt over a sample of raw reviews.
ConfounderPool direct_llm_confounders(const ReviewCorpus& corpus, LlmSession& llm, std::uint64_t seed,
                                      std::size_t per_group = 3);

struct ConfounderSubspace {
  Matrix centroids;  // J' x k
};

/// Encodes name, description and reasoning of each entry, reduces to k
/// dimensions by PCA and keeps min(J, |pool|) k-means centroids.
ConfounderSubspace build_subspace(const ConfounderPool& pool, representation::TextEncoderPort& encoder, Index k,
                                  Index j, std::uint64_t seed);

void write_pool(std::ostream& out, const ConfounderPool& pool);
ConfounderPool read_pool(std::istream& in);
void write_subspace(std::ostream& out, const ConfounderSubspace& s);
ConfounderSubspace read_subspace(std::istream& in);

}  // namespace cicdor::discovery
