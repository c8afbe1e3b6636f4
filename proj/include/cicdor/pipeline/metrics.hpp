#pragma once

#include <span>
#include <vector>

#include "cicdor/numerics/matrix.hpp"

namespace cicdor::pipeline {

inline constexpr int kTopK = 10;

/// 1-based rank of the positive among its candidates when sorted by score
/// descending, ties broken by ascending item id.
int rank_of_positive(Index positive_item, double positive_score, std::span<const Index> items,
                     std::span<const double> scores);

struct SampleMetrics {
  double hr = 0.0;
  double ndcg = 0.0;
};

/// HR@10 and NDCG@10 for one candidate set given the positive's rank.
SampleMetrics metrics_at_rank(int rank, int k = kTopK);

struct MetricsReport {
  double hr_at_10 = 0.0;
  double ndcg_at_10 = 0.0;
  std::size_t samples = 0;
};

/// Averages per-set metrics; `ranks` holds the positive's rank in each set.
MetricsReport summarize(std::span<const int> ranks);

}  // namespace cicdor::pipeline
