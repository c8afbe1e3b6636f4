#pragma once

#include <span>

#include "cicdor/data/corpus.hpp"
#include "cicdor/numerics/autodiff.hpp"

namespace cicdor::representation {

/// User-item bipartite graph over m + n nodes (users first). The propagation
/// matrix holds 1/sqrt(d_i d_j) on every edge and a unit self-weight on
/// isolated nodes so they keep their embedding.
class BipartiteGraph {
 public:
  static BipartiteGraph build(Index num_users, Index num_items, std::span<const data::Interaction> edges);

  const ad::SparseMatrix& propagation() const { return p_; }
  Index num_users() const { return m_; }
  Index num_items() const { return n_; }

 private:
  ad::SparseMatrix p_;
  Index m_ = 0;
  Index n_ = 0;
};

struct GraphEmbeddings {
  ad::Var users;  // E_u
  ad::Var items;  // E_v
};

/// Parameter-free propagation; output is the mean of layers 0..layers.
GraphEmbeddings gcn_propagate(const BipartiteGraph& graph, const ad::Var& e_ui, const ad::Var& e_vi,
                              int layers = 2);

}  // namespace cicdor::representation
