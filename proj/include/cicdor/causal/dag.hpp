#pragma once

#include <filesystem>
#include <string>

#include "cicdor/numerics/autodiff.hpp"
#include "cicdor/numerics/random.hpp"

namespace cicdor::causal {

enum class DagLevel { Specific, Shared };

std::string to_string(DagLevel level);
DagLevel dag_level_from_string(const std::string& s);

/// Weighted adjacency over 2k nodes: attributes are nodes 0..k-1, preferences
/// k..2k-1. a(i, j) is the strength of the edge i -> j.
struct AdjacencyDag {
  ad::Var a;
  DagLevel level = DagLevel::Specific;
  Index k = 0;

  /// Small N(0, scale²) off-diagonal entries, zero diagonal. A nonzero start
  /// matters because the root-node loss has zero subgradient at a = 0.
  static AdjacencyDag init(Index k, DagLevel level, numerics::Rng& rng, double scale = 0.01);

  /// Attribute -> preference block a[0:k, k:2k].
  ad::Var attr_to_pref() const;
};

/// JSON {level, k, a: row-major}. Doubles are written with round-trip precision.
void save_dag(const std::filesystem::path& path, const AdjacencyDag& dag);
AdjacencyDag load_dag(const std::filesystem::path& path);

/// 0/1 adjacency of entries with |a| > threshold, diagonal ignored.
Matrix threshold_graph(const Matrix& a, double threshold = 0.3);

/// Edge additions + deletions + reversals (a reversal counts once) between two
/// 0/1 directed graphs.
int structural_hamming_distance(const Matrix& estimate, const Matrix& truth);

}  // namespace cicdor::causal
