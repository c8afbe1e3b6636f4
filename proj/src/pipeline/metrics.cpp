#include "cicdor/pipeline/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace cicdor::pipeline {

int rank_of_positive(Index positive_item, double positive_score, std::span<const Index> items,
                     std::span<const double> scores) {
  if (items.size() != scores.size()) throw std::invalid_argument("rank_of_positive: size mismatch");
  int rank = 1;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (items[i] == positive_item) continue;
    if (scores[i] > positive_score || (scores[i] == positive_score && items[i] < positive_item)) ++rank;
  }
  return rank;
}

SampleMetrics metrics_at_rank(int rank, int k) {
  if (rank < 1) throw std::invalid_argument("metrics_at_rank: rank must be positive");
  if (rank > k) return {};
  return {1.0, 1.0 / std::log2(static_cast<double>(rank) + 1.0)};
}

MetricsReport summarize(std::span<const int> ranks) {
  MetricsReport r;
  r.samples = ranks.size();
  if (ranks.empty()) return r;
  for (const int rank : ranks) {
    const auto m = metrics_at_rank(rank);
    r.hr_at_10 += m.hr;
    r.ndcg_at_10 += m.ndcg;
  }
  r.hr_at_10 /= static_cast<double>(ranks.size());
  r.ndcg_at_10 /= static_cast<double>(ranks.size());
  return r;
}

}  // namespace cicdor::pipeline
