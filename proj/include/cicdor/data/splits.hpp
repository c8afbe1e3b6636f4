#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cicdor/data/corpus.hpp"

namespace cicdor::data {

enum class SplitSetting { UserDegreeShift, RegionShift, Iid };

std::string to_string(SplitSetting s);
SplitSetting split_setting_from_string(const std::string& s);

/// Positive pairs divided 8:1:1 into train/val/test.
struct OodSplit {
  std::vector<Interaction> train;
  std::vector<Interaction> val;
  std::vector<Interaction> test;
  SplitSetting setting = SplitSetting::Iid;
  double shift_ratio = 0.0;
  std::uint64_t seed = 0;
  std::optional<std::string> region;
};

/// Users in the top quartile of positive-interaction degree, ties broken by
/// ascending user id. Throws DataError when every user has the same degree.
std::vector<bool> high_degree_users(const InteractionCorpus& corpus);

/// Test pairs: `shift_ratio` of them from high-degree users, the rest from
/// other users. Train and validation are drawn uniformly from what remains.
OodSplit split_ood_degree(const InteractionCorpus& corpus, double shift_ratio, std::uint64_t seed);

/// As split_ood_degree with membership of `region` replacing high degree.
OodSplit split_ood_region(const InteractionCorpus& corpus, const std::string& region,
                          double shift_ratio, std::uint64_t seed);

OodSplit split_iid(const InteractionCorpus& corpus, std::uint64_t seed);

struct LabeledPair {
  Index user = 0;
  Index item = 0;
  int label = 0;
};

struct TrainingSample {
  std::vector<LabeledPair> pairs;         // each positive followed by its negatives
  std::vector<Index> replacement_users;   // users sampled with replacement (sorted, unique)
  std::vector<Index> exhausted_users;     // users with no item left to sample
};

/// For every training positive draws `ratio` items the user has no positive
/// for anywhere in the split. Users with fewer than `ratio` candidates are
/// sampled with replacement and flagged.
TrainingSample sample_negatives(const OodSplit& split, Index num_items, std::uint64_t seed,
                                int ratio = 3);

struct EvalCandidateSet {
  Index user = 0;
  Index positive_item = 0;
  std::vector<Index> negatives;  // exactly 99, never rated by the user
};

inline constexpr int kEvalNegatives = 99;

/// One candidate set per test positive; negatives are distinct items the
/// user never rated. Throws DataError naming a user with too few such items.
std::vector<EvalCandidateSet> build_eval_candidates(const OodSplit& split,
                                                    const InteractionCorpus& corpus,
                                                    std::uint64_t seed);

}  // namespace cicdor::data
