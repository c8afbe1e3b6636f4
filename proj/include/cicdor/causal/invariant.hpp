#pragma once

#include <string>
#include <vector>

#include "cicdor/causal/dag.hpp"
#include "cicdor/numerics/layers.hpp"

namespace cicdor::causal {

/// Feeds E_att ∥ 0 through the SCM and returns the preference half of the
/// output. One application gives e_att · A[0:k, k:2k]. With `fixed_point` the
/// map H = X + H A is iterated 2k times instead, which equals X (I − A)⁻¹
/// whenever A is acyclic.
ad::Var infer_invariant(const AdjacencyDag& dag, const ad::Var& e_att, bool fixed_point = false);

/// Per-user convex blend of two preference matrices, weights
/// softmax(qᵀ tanh(W x_a), qᵀ tanh(W x_b)).
struct FusionAttention {
  ad::Var w;  // k x k, applied as x W
  ad::Var q;  // k x 1, zero at init so training starts from an even blend

  static FusionAttention init(Index k, numerics::Rng& rng);
  void collect(const std::string& prefix, std::vector<nn::NamedParam>& out) const;
};

struct Fused {
  ad::Var value;    // m x k
  ad::Var weights;  // m x 2, rows sum to 1
};

Fused fuse_attention(const ad::Var& e_a, const ad::Var& e_b, const FusionAttention& att);

}  // namespace cicdor::causal
