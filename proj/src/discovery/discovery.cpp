#include "cicdor/discovery/discovery.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include <json.hpp>

#include "cicdor/discovery/ci.hpp"
#include "cicdor/discovery/fci.hpp"
#include "cicdor/numerics/entropy.hpp"
#include "cicdor/numerics/kmeans.hpp"
#include "cicdor/numerics/pca.hpp"
#include "cicdor/numerics/random.hpp"

namespace cicdor::discovery {

using numerics::mix_seed;
using numerics::Rng;

namespace {

enum Stream : std::uint64_t { kUserStream = 11, kGroupStream = 12, kClusterStream = 13, kFeedbackStream = 14,
                              kNegativeStream = 15 };

template <class T>
std::vector<T> sample_without_replacement(std::vector<T> pool, std::size_t count, Rng& rng) {
  std::vector<T> out;
  while (out.size() < count && !pool.empty()) {
    const std::size_t j = rng.index(pool.size());
    out.push_back(pool[j]);
    pool[j] = pool.back();
    pool.pop_back();
  }
  return out;
}

std::set<std::string> names_of(const std::vector<CausalVariable>& vars) {
  std::set<std::string> out;
  for (const auto& v : vars) out.insert(v.name);
  return out;
}

std::vector<std::string> names_at(const std::vector<CausalVariable>& vars, const std::vector<std::size_t>& idx) {
  std::vector<std::string> out;
  for (const std::size_t i : idx) out.push_back(vars[i].name);
  return out;
}

template <class T, class Parse>
T parse_with_retry(LlmSession& llm, int round, const std::string& step, const std::string& prompt, bool object,
                   Parse parse, std::string* raw = nullptr) {
  std::string reply = llm.call(round, step, prompt);
  try {
    if (raw) *raw = reply;
    return parse(reply);
  } catch (const ParseError&) {
  }
  reply = llm.call(round, step + "-retry", format_reminder(prompt, object));
  if (raw) *raw = reply;
  try {
    return parse(reply);
  } catch (const ParseError& e) {
    throw ParseError(step + " reply unparseable after one retry (" + e.what() + "); raw reply: " + reply);
  }
}

}  // namespace

ReviewCorpus review_corpus(const data::InteractionCorpus& corpus, std::uint64_t seed, std::size_t max_users,
                           std::size_t per_user) {
  std::map<Index, std::vector<std::size_t>> by_user;
  const auto& events = corpus.events();
  for (std::size_t e = 0; e < events.size(); ++e) {
    if (events[e].review && !events[e].review->empty()) by_user[events[e].user].push_back(e);
  }
  std::vector<Index> users;
  for (const auto& [u, _] : by_user) users.push_back(u);
  Rng rng(mix_seed(seed, kUserStream));
  rng.shuffle(users.begin(), users.end());
  if (users.size() > max_users) users.resize(max_users);
  std::sort(users.begin(), users.end());

  ReviewCorpus out;
  out.domain = corpus.domain_name();
  for (const Index u : users) {
    const auto& evs = by_user[u];
    for (std::size_t i = 0; i < evs.size() && i < per_user; ++i) {
      const auto& e = events[evs[i]];
      out.reviews.push_back({corpus.users()[static_cast<std::size_t>(u)].id + "|" +
                                 corpus.items()[static_cast<std::size_t>(e.item)] + "|" + std::to_string(i),
                             e.rating, *e.review});
    }
  }
  return out;
}

std::vector<Review> sample_reviews(const ReviewCorpus& corpus, std::uint64_t seed, std::size_t per_group) {
  if (corpus.reviews.empty()) throw std::invalid_argument("sample_reviews: corpus has no reviews");
  std::vector<Review> out;
  for (int rating = 1; rating <= 5; ++rating) {
    std::vector<std::size_t> group;
    for (std::size_t i = 0; i < corpus.reviews.size(); ++i)
      if (corpus.reviews[i].rating == rating) group.push_back(i);
    Rng rng(mix_seed(mix_seed(seed, kGroupStream), static_cast<std::uint64_t>(rating)));
    for (const std::size_t i : sample_without_replacement(group, per_group, rng)) out.push_back(corpus.reviews[i]);
  }
  return out;
}

ProposalOutcome propose_variables(LlmSession& llm, int round, const std::string& prompt,
                                  const std::vector<CausalVariable>& existing) {
  ProposalOutcome out;
  const auto parsed = parse_with_retry<std::vector<ProposedVariable>>(llm, round, "propose", prompt, false,
                                                                      parse_proposal, &out.raw_reply);
  auto seen = names_of(existing);
  for (const auto& p : parsed) {
    const auto name = normalize_name(p.name);
    if (name.empty() || !seen.insert(name).second) {
      ++out.duplicates;
      continue;
    }
    out.added.push_back({name, p.criterion, round});
  }
  return out;
}

AnnotationOutcome annotate_reviews(LlmSession& llm, int round, const ReviewCorpus& corpus,
                                   const std::vector<CausalVariable>& variables, double max_coerced_rate) {
  AnnotationOutcome out;
  const std::size_t n = corpus.reviews.size();
  std::vector<std::string> prompts;
  prompts.reserve(n * variables.size());
  for (const auto& r : corpus.reviews)
    for (const auto& v : variables) prompts.push_back(annotation_prompt(corpus.domain, v, r));
  const auto replies = llm.call_batch(round, "annotate", prompts);
  out.columns.assign(variables.size(), std::vector<int>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < variables.size(); ++j) {
      const auto v = parse_annotation(replies[i * variables.size() + j]);
      if (!v) ++out.coerced;
      out.columns[j][i] = v.value_or(0);
    }
  }
  out.calls = replies.size();
  if (out.calls > 0 && static_cast<double>(out.coerced) > max_coerced_rate * static_cast<double>(out.calls)) {
    throw LlmError(std::to_string(out.coerced) + " of " + std::to_string(out.calls) +
                   " annotation replies were outside {-1, 0, 1}");
  }
  return out;
}

std::vector<int> review_labels(const ReviewCorpus& corpus) {
  std::vector<int> y;
  y.reserve(corpus.reviews.size());
  for (const auto& r : corpus.reviews) y.push_back(data::implicit_label(r.rating));
  return y;
}

Refinement refine_variables(const AnnotationMatrix& q, double alpha, std::size_t max_condition) {
  Refinement out;
  const auto filter = ci_filter(q.q, q.y, alpha, max_condition);
  out.filtered = filter.kept;
  if (!out.filtered.empty()) {
    std::vector<std::vector<int>> cols;
    for (const std::size_t j : out.filtered) cols.push_back(q.q[j]);
    cols.push_back(q.y);
    const auto fci = fci_discover(DiscreteTable(std::move(cols)), {alpha, max_condition, true});
    out.degenerate_tests = fci.degenerate_tests;
    for (const std::size_t m : markov_blanket(fci.pag, out.filtered.size())) out.blanket.push_back(out.filtered[m]);
  }
  for (std::size_t j = 0; j < q.q.size(); ++j)
    if (std::find(out.blanket.begin(), out.blanket.end(), j) == out.blanket.end()) out.pool.push_back(j);
  return out;
}

bool ConfounderPool::contains(const std::string& name) const {
  const auto key = normalize_name(name);
  return std::any_of(entries.begin(), entries.end(), [&](const ConfounderEntry& e) { return normalize_name(e.name) == key; });
}

ExtractionOutcome extract_confounders(LlmSession& llm, int round, const std::string& domain,
                                      const std::vector<CausalVariable>& blanket, const ConfounderPool& pool,
                                      const std::vector<NonConfounder>& negatives, std::uint64_t seed) {
  std::optional<ExtractionExamples> examples;
  if (!pool.entries.empty()) {
    examples = ExtractionExamples{pool.entries.front(), std::nullopt};
    if (!negatives.empty()) {
      Rng rng(mix_seed(mix_seed(seed, kNegativeStream), static_cast<std::uint64_t>(round)));
      examples->negative = negatives[rng.index(negatives.size())];
    }
  }
  ExtractionOutcome out;
  out.prompt = extraction_prompt(domain, blanket, examples);
  const auto reply = parse_with_retry<ExtractionReply>(llm, round, "extract", out.prompt, true, parse_extraction);
  ConfounderPool seen = pool;
  for (auto c : reply.confounders) {
    c.name = normalize_name(c.name);
    if (c.name.empty() || seen.contains(c.name)) continue;
    c.round = round;
    seen.entries.push_back(c);
    out.added.push_back(c);
  }
  for (auto nc : reply.non_confounders) {
    nc.name = normalize_name(nc.name);
    out.non_confounders.push_back(nc);
  }
  return out;
}

FeedbackOutcome causal_feedback(const AnnotationMatrix& q, const std::vector<std::size_t>& blanket,
                                const ReviewCorpus& corpus, std::uint64_t seed, std::size_t clusters,
                                std::size_t sample_size) {
  const std::size_t n = q.y.size();
  if (n == 0) throw std::invalid_argument("causal_feedback: no reviews");
  FeedbackOutcome out;
  std::vector<std::vector<int>> cols;
  for (const std::size_t j : blanket) cols.push_back(q.q.at(j));

  std::vector<Index> assign(n, 0);
  if (blanket.empty()) {
    out.clusters = 1;
  } else {
    out.clusters = std::min(clusters, n);
    out.clusters_reduced = out.clusters < clusters;
    Matrix x(static_cast<Index>(n), static_cast<Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c)
      for (std::size_t i = 0; i < n; ++i) x(static_cast<Index>(i), static_cast<Index>(c)) = cols[c][i];
    assign = numerics::kmeans(x, static_cast<Index>(out.clusters), mix_seed(seed, kClusterStream)).assignments;
  }

  std::vector<std::vector<std::size_t>> members(out.clusters);
  for (std::size_t i = 0; i < n; ++i) members[static_cast<std::size_t>(assign[i])].push_back(i);
  out.cluster_entropy.assign(out.clusters, 0.0);
  for (std::size_t c = 0; c < out.clusters; ++c) {
    if (members[c].empty()) continue;
    out.cluster_entropy[c] = numerics::conditional_entropy(q.y, cols, members[c]);
    if (out.cluster_entropy[c] > out.cluster_entropy[out.chosen_cluster]) out.chosen_cluster = c;
  }
  out.max_entropy = out.cluster_entropy[out.chosen_cluster];

  Rng rng(mix_seed(seed, kFeedbackStream));
  auto picked = sample_without_replacement(members[out.chosen_cluster], sample_size, rng);
  std::sort(picked.begin(), picked.end());
  for (const std::size_t i : picked) out.samples.push_back(corpus.reviews[i]);
  return out;
}

DiscoveryError::DiscoveryError(int round, std::string step, const std::string& what, ConfounderPool partial)
    : std::runtime_error("discovery round " + std::to_string(round) + ", step '" + step + "': " + what),
      round_(round),
      step_(std::move(step)),
      partial_(std::move(partial)) {}

DiscoveryResult run_discovery(const ReviewCorpus& corpus, LlmSession& llm, const DiscoveryOptions& o) {
  if (o.max_rounds < 1) throw std::invalid_argument("run_discovery: max_rounds must be at least 1");
  DiscoveryResult res;
  res.q.y = review_labels(corpus);
  for (const auto& r : corpus.reviews) res.q.review_ids.push_back(r.id);
  std::vector<NonConfounder> negatives;
  std::optional<std::vector<std::string>> previous_blanket;
  std::string prompt;

  int round = 0;
  std::string step;
  auto fail = [&](const std::exception& e) -> DiscoveryError { return {round, step, e.what(), res.pool}; };

  try {
    step = "sample";
    prompt = proposal_prompt(corpus.domain, sample_reviews(corpus, o.seed, o.per_group));
    for (round = 1; round <= o.max_rounds; ++round) {
      RoundTrace trace;
      trace.round = round;

      step = "propose";
      const auto proposal = propose_variables(llm, round, prompt, res.variables);
      for (const auto& v : proposal.added) trace.proposed.push_back(v.name);

      step = "annotate";
      const auto annotation = annotate_reviews(llm, round, corpus, proposal.added, o.max_coerced_rate);
      trace.coerced = annotation.coerced;
      for (std::size_t j = 0; j < proposal.added.size(); ++j) {
        res.variables.push_back(proposal.added[j]);
        res.q.variables.push_back(proposal.added[j].name);
        res.q.q.push_back(annotation.columns[j]);
      }

      step = "refine";
      res.refinement = res.q.q.empty() ? Refinement{} : refine_variables(res.q, o.alpha, o.max_condition);
      trace.filtered = names_at(res.variables, res.refinement.filtered);
      trace.blanket = names_at(res.variables, res.refinement.blanket);
      trace.degenerate_tests = res.refinement.degenerate_tests;

      step = "extract";
      if (!res.refinement.blanket.empty()) {
        std::vector<CausalVariable> blanket;
        for (const std::size_t j : res.refinement.blanket) blanket.push_back(res.variables[j]);
        const auto ext = extract_confounders(llm, round, corpus.domain, blanket, res.pool, negatives, o.seed);
        for (const auto& c : ext.added) {
          res.pool.entries.push_back(c);
          trace.new_confounders.push_back(c.name);
        }
        for (const auto& nc : ext.non_confounders) {
          const bool known = std::any_of(negatives.begin(), negatives.end(),
                                         [&](const NonConfounder& x) { return x.name == nc.name; });
          if (!known && !res.pool.contains(nc.name)) negatives.push_back(nc);
        }
      }

      step = "feedback";
      const auto fb = causal_feedback(res.q, res.refinement.blanket, corpus,
                                      mix_seed(o.seed, static_cast<std::uint64_t>(round)), o.clusters,
                                      o.feedback_samples);
      trace.max_entropy = fb.max_entropy;
      res.rounds.push_back(trace);

      const bool repeated = previous_blanket && *previous_blanket == trace.blanket;
      if (repeated || fb.max_entropy < o.entropy_stop) {
        res.converged = true;
        break;
      }
      previous_blanket = trace.blanket;
      std::vector<std::string> all_names;
      for (const auto& v : res.variables) all_names.push_back(v.name);
      prompt = feedback_prompt(prompt, fb.samples, trace.blanket, all_names);
    }
  } catch (const DiscoveryError&) {
    throw;
  } catch (const std::exception& e) {
    throw fail(e);
  }
  return res;
}

ConfounderPool direct_llm_confounders(const ReviewCorpus& corpus, LlmSession& llm, std::uint64_t seed,
                                      std::size_t per_group) {
  const auto prompt = direct_prompt(corpus.domain, sample_reviews(corpus, seed, per_group));
  const auto reply = parse_with_retry<ExtractionReply>(llm, 1, "direct", prompt, true, parse_extraction);
  ConfounderPool pool;
  for (auto c : reply.confounders) {
    c.name = normalize_name(c.name);
    if (c.name.empty() || pool.contains(c.name)) continue;
    c.round = 1;
    pool.entries.push_back(c);
  }
  return pool;
}

ConfounderSubspace build_subspace(const ConfounderPool& pool, representation::TextEncoderPort& encoder, Index k,
                                  Index j, std::uint64_t seed) {
  if (pool.entries.empty()) {
    throw std::invalid_argument("confounder pool is empty; run with deconfounding disabled instead");
  }
  if (k < 1 || j < 1) throw std::invalid_argument("build_subspace: k and J must be positive");
  std::vector<std::string> texts;
  for (const auto& e : pool.entries) texts.push_back(e.name + ". " + e.description + ". " + e.reasoning);
  const Matrix x = encoder.encode(texts);
  Matrix reduced = Matrix::Zero(x.rows(), k);
  if (x.rows() >= 2) reduced = numerics::pca(x, std::min(k, x.cols())).transform(x);
  const Index clusters = std::min<Index>(j, reduced.rows());
  return {numerics::kmeans(reduced, clusters, seed).centroids};
}

void write_pool(std::ostream& out, const ConfounderPool& pool) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& e : pool.entries)
    j.push_back({{"name", e.name}, {"description", e.description}, {"reasoning", e.reasoning}, {"round", e.round}});
  out << j.dump(2) << '\n';
}

ConfounderPool read_pool(std::istream& in) {
  ConfounderPool pool;
  try {
    const auto j = nlohmann::json::parse(in);
    for (const auto& e : j) {
      pool.entries.push_back({e.at("name").get<std::string>(), e.at("description").get<std::string>(),
                              e.at("reasoning").get<std::string>(), e.at("round").get<int>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("confounder pool file: ") + e.what());
  }
  return pool;
}

void write_subspace(std::ostream& out, const ConfounderSubspace& s) {
  std::vector<double> flat;
  for (Index r = 0; r < s.centroids.rows(); ++r)
    for (Index c = 0; c < s.centroids.cols(); ++c) flat.push_back(s.centroids(r, c));
  out << nlohmann::json{{"J", s.centroids.rows()}, {"k", s.centroids.cols()}, {"centroids", flat}}.dump() << '\n';
}

ConfounderSubspace read_subspace(std::istream& in) {
  try {
    const auto j = nlohmann::json::parse(in);
    const auto rows = j.at("J").get<Index>();
    const auto cols = j.at("k").get<Index>();
    const auto flat = j.at("centroids").get<std::vector<double>>();
    if (static_cast<Index>(flat.size()) != rows * cols) throw std::runtime_error("subspace file: size mismatch");
    ConfounderSubspace s{Matrix(rows, cols)};
    for (Index r = 0; r < rows; ++r)
      for (Index c = 0; c < cols; ++c) s.centroids(r, c) = flat[static_cast<std::size_t>(r * cols + c)];
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("subspace file: ") + e.what());
  }
}

}  // namespace cicdor::discovery
