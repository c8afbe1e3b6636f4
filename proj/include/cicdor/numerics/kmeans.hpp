#pragma once

#include <cstdint>
#include <vector>

#include "cicdor/numerics/matrix.hpp"

namespace cicdor::numerics {

struct KMeans {
  Matrix centroids;                    // J x D
  std::vector<Index> assignments;      // one per row of the input
  std::vector<double> inertia_history; // after every Lloyd update, non-increasing
  int iterations = 0;
  bool converged = false;              // assignment fixpoint reached

  double inertia() const { return inertia_history.empty() ? 0.0 : inertia_history.back(); }
};

/// Lloyd's algorithm from k-means++ seeding. Stops at an assignment fixpoint
/// or after `max_iterations`. Ties go to the lowest centroid index; empty
/// clusters keep their previous centroid.
KMeans kmeans(const Matrix& x, Index clusters, std::uint64_t seed, int max_iterations = 300);

}  // namespace cicdor::numerics
