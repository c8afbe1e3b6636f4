#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cicdor/data/corpus.hpp"
#include "cicdor/discovery/mock_llm.hpp"

namespace cicdor::synthetic {

struct CrossDomainOptions {
  std::size_t users = 300;
  std::size_t items_source = 200;
  std::size_t items_target = 200;
  int latent = 4;
  int min_degree = 6;
  int max_degree = 40;
  double promoted_share = 0.3;
  double confounding = 1.5;       // weight of promotion on both exposure and rating
  double domain_specific = 0.4;   // share of the target preference map that is target-only
  double style_reliability = 0.9; // chance a low-degree user's style word names their favourite cluster
  double rating_noise = 0.5;
  bool reversed_style = false;    // high-degree users name a cluster other than their favourite
};

/// Two domains over one user set. Latent user attributes set preferences
/// through a map shared across domains plus a target-only part. Item
/// promotion, delivery speed and customer service raise both the chance of
/// an interaction and the rating (confounders). Reviews use the planted
/// vocabulary, so the mock language model can discover them, and carry a
/// style word that names the user's favourite item cluster for low-degree
/// users; high-degree users repeat a style word of their own instead.
struct CrossDomainData {
  std::vector<data::EventRecord> source;
  std::vector<data::EventRecord> target;
  discovery::MockWorld world;
};

CrossDomainData cross_domain_benchmark(std::uint64_t seed, const CrossDomainOptions& options = {});

}  // namespace cicdor::synthetic
