#include "cicdor/data/splits.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "cicdor/numerics/random.hpp"

namespace cicdor::data {
namespace {

using numerics::Rng;
using numerics::mix_seed;

enum Stream : std::uint64_t { kTestStream = 1, kValStream = 2, kNegStream = 3, kEvalStream = 4 };

std::size_t tenth(std::size_t n) {
  return static_cast<std::size_t>(std::llround(static_cast<double>(n) / 10.0));
}

template <class T>
std::vector<T> take_random(std::vector<T>& pool, std::size_t count, Rng& rng) {
  // Partial Fisher-Yates from the back; `pool` keeps the untaken elements.
  std::vector<T> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = rng.index(pool.size());
    out.push_back(pool[j]);
    pool[j] = pool.back();
    pool.pop_back();
  }
  return out;
}

void check_ratio(double shift_ratio) {
  if (!(shift_ratio >= 0.0 && shift_ratio <= 1.0)) {
    throw DataError("shift_ratio must lie in [0, 1]");
  }
}

OodSplit shifted_split(const InteractionCorpus& corpus, const std::vector<bool>& in_group,
                       const std::string& group_name, double shift_ratio, std::uint64_t seed) {
  check_ratio(shift_ratio);
  const auto implicit = to_implicit(corpus.events());
  const auto& positives = implicit.positives;
  if (positives.empty()) throw DataError("corpus has no positive interactions");

  std::vector<Interaction> group;
  std::vector<Interaction> rest;
  for (const auto& p : positives) {
    (in_group[static_cast<std::size_t>(p.user)] ? group : rest).push_back(p);
  }

  const std::size_t n_test = tenth(positives.size());
  const std::size_t n_val = tenth(positives.size());
  const auto n_group =
      static_cast<std::size_t>(std::llround(shift_ratio * static_cast<double>(n_test)));
  const std::size_t n_rest = n_test - n_group;
  if (group.size() < n_group) {
    throw DataError("test quota needs " + std::to_string(n_group) + " positives from " + group_name +
                    " users but only " + std::to_string(group.size()) + " exist (shortfall " +
                    std::to_string(n_group - group.size()) + ")");
  }
  if (rest.size() < n_rest) {
    throw DataError("test quota needs " + std::to_string(n_rest) + " positives from non-" +
                    group_name + " users but only " + std::to_string(rest.size()) +
                    " exist (shortfall " + std::to_string(n_rest - rest.size()) + ")");
  }

  Rng rng(mix_seed(seed, kTestStream));
  OodSplit split;
  split.seed = seed;
  split.shift_ratio = shift_ratio;
  split.test = take_random(group, n_group, rng);
  auto rest_test = take_random(rest, n_rest, rng);
  split.test.insert(split.test.end(), rest_test.begin(), rest_test.end());

  std::vector<Interaction> remaining = std::move(group);
  remaining.insert(remaining.end(), rest.begin(), rest.end());
  std::sort(remaining.begin(), remaining.end());
  Rng val_rng(mix_seed(seed, kValStream));
  split.val = take_random(remaining, n_val, val_rng);
  split.train = std::move(remaining);

  std::sort(split.train.begin(), split.train.end());
  std::sort(split.val.begin(), split.val.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

}  // namespace

std::string to_string(SplitSetting s) {
  switch (s) {
    case SplitSetting::UserDegreeShift:
      return "user_degree_shift";
    case SplitSetting::RegionShift:
      return "region_shift";
    case SplitSetting::Iid:
      return "iid";
  }
  return "iid";
}

SplitSetting split_setting_from_string(const std::string& s) {
  if (s == "user_degree_shift") return SplitSetting::UserDegreeShift;
  if (s == "region_shift") return SplitSetting::RegionShift;
  if (s == "iid") return SplitSetting::Iid;
  throw DataError("unknown split setting '" + s + "'");
}

std::vector<bool> high_degree_users(const InteractionCorpus& corpus) {
  const auto implicit = to_implicit(corpus.events());
  std::vector<Index> degree(static_cast<std::size_t>(corpus.num_users()), 0);
  for (const auto& p : implicit.positives) ++degree[static_cast<std::size_t>(p.user)];
  if (degree.empty()) throw DataError("corpus has no users");
  if (std::all_of(degree.begin(), degree.end(), [&](Index d) { return d == degree.front(); })) {
    throw DataError("all users have equal degree; high-degree quartile is undefined");
  }

  // User index order equals id order, so a stable sort breaks ties by id.
  std::vector<std::size_t> order(degree.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return degree[a] > degree[b]; });
  const std::size_t quartile = (degree.size() + 3) / 4;
  std::vector<bool> high(degree.size(), false);
  for (std::size_t i = 0; i < quartile; ++i) high[order[i]] = true;
  return high;
}

OodSplit split_ood_degree(const InteractionCorpus& corpus, double shift_ratio, std::uint64_t seed) {
  auto split = shifted_split(corpus, high_degree_users(corpus), "high-degree", shift_ratio, seed);
  split.setting = SplitSetting::UserDegreeShift;
  return split;
}

OodSplit split_ood_region(const InteractionCorpus& corpus, const std::string& region,
                          double shift_ratio, std::uint64_t seed) {
  if (!corpus.has_region_metadata()) throw DataError("corpus has no region metadata");
  std::vector<bool> in_region;
  std::size_t members = 0;
  for (const auto& u : corpus.users()) {
    const bool hit = u.region && *u.region == region;
    in_region.push_back(hit);
    members += hit;
  }
  if (members == 0) throw DataError("region '" + region + "' has no users");
  auto split = shifted_split(corpus, in_region, "region '" + region + "'", shift_ratio, seed);
  split.setting = SplitSetting::RegionShift;
  split.region = region;
  return split;
}

OodSplit split_iid(const InteractionCorpus& corpus, std::uint64_t seed) {
  const auto implicit = to_implicit(corpus.events());
  if (implicit.positives.empty()) throw DataError("corpus has no positive interactions");
  std::vector<Interaction> pool = implicit.positives;
  const std::size_t n_test = tenth(pool.size());
  const std::size_t n_val = tenth(pool.size());
  Rng rng(mix_seed(seed, kTestStream));
  OodSplit split;
  split.seed = seed;
  split.setting = SplitSetting::Iid;
  split.test = take_random(pool, n_test, rng);
  std::sort(pool.begin(), pool.end());
  Rng val_rng(mix_seed(seed, kValStream));
  split.val = take_random(pool, n_val, val_rng);
  split.train = std::move(pool);
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.val.begin(), split.val.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

TrainingSample sample_negatives(const OodSplit& split, Index num_items, std::uint64_t seed,
                                int ratio) {
  if (split.train.empty()) throw DataError("sample_negatives: training split is empty");
  std::map<Index, std::set<Index>> known;
  for (const auto* part : {&split.train, &split.val, &split.test}) {
    for (const auto& p : *part) known[p.user].insert(p.item);
  }

  Rng rng(mix_seed(seed, kNegStream));
  TrainingSample out;
  std::set<Index> replacement;
  std::set<Index> exhausted;
  for (const auto& pos : split.train) {
    out.pairs.push_back({pos.user, pos.item, 1});
    const auto& mine = known[pos.user];
    const auto available = num_items - static_cast<Index>(mine.size());
    if (available <= 0) {
      exhausted.insert(pos.user);
      continue;
    }
    if (available < ratio) {
      replacement.insert(pos.user);
      std::vector<Index> free_items;
      for (Index i = 0; i < num_items; ++i) {
        if (!mine.count(i)) free_items.push_back(i);
      }
      for (int k = 0; k < ratio; ++k) {
        out.pairs.push_back({pos.user, free_items[rng.index(free_items.size())], 0});
      }
      continue;
    }
    std::set<Index> drawn;
    while (static_cast<int>(drawn.size()) < ratio) {
      const auto item = static_cast<Index>(rng.index(static_cast<std::size_t>(num_items)));
      if (mine.count(item) || drawn.count(item)) continue;
      drawn.insert(item);
      out.pairs.push_back({pos.user, item, 0});
    }
  }
  out.replacement_users.assign(replacement.begin(), replacement.end());
  out.exhausted_users.assign(exhausted.begin(), exhausted.end());
  return out;
}

std::vector<EvalCandidateSet> build_eval_candidates(const OodSplit& split,
                                                    const InteractionCorpus& corpus,
                                                    std::uint64_t seed) {
  if (split.test.empty()) throw DataError("build_eval_candidates: test split is empty");
  std::map<Index, std::vector<Index>> rated;
  for (const auto& e : corpus.events()) rated[e.user].push_back(e.item);
  for (auto& [_, items] : rated) {
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
  }

  Rng rng(mix_seed(seed, kEvalStream));
  std::vector<EvalCandidateSet> out;
  for (const auto& pos : split.test) {
    const auto& mine = rated[pos.user];
    std::vector<Index> free_items;
    for (Index i = 0; i < corpus.num_items(); ++i) {
      if (!std::binary_search(mine.begin(), mine.end(), i)) free_items.push_back(i);
    }
    if (free_items.size() < static_cast<std::size_t>(kEvalNegatives)) {
      throw DataError("user '" + corpus.users()[static_cast<std::size_t>(pos.user)].id + "' has only " +
                      std::to_string(free_items.size()) + " never-rated items; 99 are required");
    }
    EvalCandidateSet set{pos.user, pos.item, take_random(free_items, kEvalNegatives, rng)};
    out.push_back(std::move(set));
  }
  return out;
}

}  // namespace cicdor::data
