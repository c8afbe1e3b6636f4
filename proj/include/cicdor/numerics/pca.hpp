#pragma once

#include "cicdor/numerics/matrix.hpp"

namespace cicdor::numerics {

struct Pca {
  Matrix components;           // k x D, rows orthonormal except zero padding
  Vector mean;                 // D
  Vector explained_variance;   // k, non-increasing
  Index rank = 0;              // number of non-padded components
  bool zero_padded = false;    // true when k exceeded the numerical rank

  /// Projects rows of `x` (n x D) onto the components: (x - mean) * componentsᵀ.
  Matrix transform(const Matrix& x) const;
};

/// Principal components of the rows of `x` (n x D). Requires n >= 2 and
/// k <= D. Components beyond the numerical rank of the centred data are zero.
/// Each component's largest-magnitude entry is made positive so results are
/// reproducible.
Pca pca(const Matrix& x, Index k);

}  // namespace cicdor::numerics
