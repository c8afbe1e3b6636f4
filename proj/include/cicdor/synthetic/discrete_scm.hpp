#pragma once

#include <cstdint>
#include <vector>

namespace cicdor::synthetic {

/// Discrete structural causal model with nodes in topological order
/// (every parent index is smaller than its child).
struct DiscreteScm {
  std::vector<int> levels;
  std::vector<std::vector<std::size_t>> parents;
  /// cpt[v][config][value]; config is the mixed-radix code of the parent
  /// values, first parent most significant.
  std::vector<std::vector<std::vector<double>>> cpt;
  std::size_t target = 0;

  std::size_t size() const { return levels.size(); }
  std::size_t config_of(std::size_t v, const std::vector<int>& values) const;
};

struct DiscreteScmOptions {
  std::size_t nodes = 6;
  double edge_probability = 0.4;
  std::size_t max_parents = 3;
  double min_weight = 1.0;  // |logit contribution| per parent, drawn in [min, max]
  double max_weight = 2.0;
};

/// Random binary SCM with logistic-additive conditionals. The target is a
/// node chosen so that it has at least one neighbour.
DiscreteScm random_discrete_scm(std::uint64_t seed, const DiscreteScmOptions& options = {});

/// Ancestral sampling; returns one column per node.
std::vector<std::vector<int>> sample_columns(const DiscreteScm& scm, std::size_t rows, std::uint64_t seed);

}  // namespace cicdor::synthetic
