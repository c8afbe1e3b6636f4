#include "cicdor/numerics/kmeans.hpp"

#include <limits>
#include <stdexcept>

#include "cicdor/numerics/random.hpp"

namespace cicdor::numerics {
namespace {

Matrix seed_plus_plus(const Matrix& x, Index clusters, Rng& rng) {
  const Index n = x.rows();
  Matrix centroids(clusters, x.cols());
  centroids.row(0) = x.row(static_cast<Index>(rng.index(static_cast<std::size_t>(n))));

  Vector nearest = (x.rowwise() - centroids.row(0)).rowwise().squaredNorm();
  for (Index c = 1; c < clusters; ++c) {
    const double total = nearest.sum();
    Index pick = 0;
    if (total <= 0.0) {
      // Every point coincides with a chosen centre.
      pick = static_cast<Index>(rng.index(static_cast<std::size_t>(n)));
    } else {
      const double target = rng.uniform() * total;
      double running = 0.0;
      pick = n - 1;
      for (Index i = 0; i < n; ++i) {
        running += nearest(i);
        if (running > target) {
          pick = i;
          break;
        }
      }
    }
    centroids.row(c) = x.row(pick);
    nearest = nearest.cwiseMin((x.rowwise() - centroids.row(c)).rowwise().squaredNorm());
  }
  return centroids;
}

}  // namespace

KMeans kmeans(const Matrix& x, Index clusters, std::uint64_t seed, int max_iterations) {
  const Index n = x.rows();
  if (clusters < 1) throw std::invalid_argument("kmeans: need at least one cluster");
  if (n < clusters) throw std::invalid_argument("kmeans: fewer rows than clusters");
  if (!x.allFinite()) throw std::invalid_argument("kmeans: non-finite input");

  Rng rng(seed);
  KMeans out;
  out.centroids = seed_plus_plus(x, clusters, rng);
  out.assignments.assign(static_cast<std::size_t>(n), -1);

  for (int iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (Index i = 0; i < n; ++i) {
      Index best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (Index c = 0; c < clusters; ++c) {
        const double dist = (x.row(i) - out.centroids.row(c)).squaredNorm();
        if (dist < best_d) {
          best_d = dist;
          best = c;
        }
      }
      auto& slot = out.assignments[static_cast<std::size_t>(i)];
      if (slot != best) {
        slot = best;
        changed = true;
      }
    }
    if (!changed) {
      out.converged = true;
      break;
    }

    Matrix sums = Matrix::Zero(clusters, x.cols());
    std::vector<Index> counts(static_cast<std::size_t>(clusters), 0);
    for (Index i = 0; i < n; ++i) {
      const Index c = out.assignments[static_cast<std::size_t>(i)];
      sums.row(c) += x.row(i);
      ++counts[static_cast<std::size_t>(c)];
    }
    for (Index c = 0; c < clusters; ++c) {
      const auto cnt = counts[static_cast<std::size_t>(c)];
      if (cnt > 0) out.centroids.row(c) = sums.row(c) / static_cast<double>(cnt);
    }

    double inertia = 0.0;
    for (Index i = 0; i < n; ++i) {
      inertia += (x.row(i) - out.centroids.row(out.assignments[static_cast<std::size_t>(i)]))
                     .squaredNorm();
    }
    out.inertia_history.push_back(inertia);
    out.iterations = iter + 1;
  }
  return out;
}

}  // namespace cicdor::numerics
