#include "cicdor/synthetic/linear_scm.hpp"

#include "cicdor/numerics/random.hpp"

namespace cicdor::synthetic {

LinearScm linear_scm(std::uint64_t seed, Index k, Index n) {
  numerics::Rng rng(seed);
  LinearScm out;
  out.truth = Matrix::Zero(2 * k, 2 * k);
  for (Index j = 0; j < k; ++j) {
    const int parents = rng.uniform() < 0.5 ? 1 : 2;
    for (int p = 0; p < parents; ++p) {
      const auto i = static_cast<Index>(rng.index(static_cast<std::size_t>(k)));
      const double w = rng.uniform(0.8, 1.6);
      out.truth(i, k + j) = rng.uniform() < 0.5 ? -w : w;
    }
  }
  out.rows.resize(n, 2 * k);
  for (Index r = 0; r < n; ++r) {
    for (Index i = 0; i < k; ++i) out.rows(r, i) = rng.normal();
    for (Index j = 0; j < k; ++j)
      out.rows(r, k + j) = out.rows.row(r).head(k).dot(out.truth.col(k + j).head(k)) + rng.normal();
  }
  return out;
}

}  // namespace cicdor::synthetic
