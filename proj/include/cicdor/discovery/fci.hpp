#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cicdor/discovery/ci.hpp"

namespace cicdor::discovery {

enum class Mark : std::uint8_t { None, Arrow, Tail, Circle };

/// Partial ancestral graph. mark(i, j) is the endpoint mark at j on the edge
/// between i and j, so i → j reads mark(i, j) == Arrow, mark(j, i) == Tail.
class Pag {
 public:
  Pag() = default;
  explicit Pag(std::size_t n);

  std::size_t size() const { return n_; }
  bool adjacent(std::size_t i, std::size_t j) const { return mark(i, j) != Mark::None; }
  Mark mark(std::size_t i, std::size_t j) const { return marks_[i * n_ + j]; }
  void set_mark(std::size_t i, std::size_t j, Mark m) { marks_[i * n_ + j] = m; }
  void add_edge(std::size_t i, std::size_t j, Mark at_i, Mark at_j);
  void remove_edge(std::size_t i, std::size_t j);
  std::vector<std::size_t> adjacents(std::size_t i) const;

  /// "a o-> b" style rendering, one edge per line.
  std::string describe(const std::vector<std::string>& names) const;

 private:
  std::size_t n_ = 0;
  std::vector<Mark> marks_;
};

struct FciOptions {
  double alpha = 0.05;
  std::size_t max_condition = 3;
  bool possible_dsep = true;
};

struct FciResult {
  Pag pag;
  std::size_t tests = 0;
  std::size_t degenerate_tests = 0;  // zero-df tests treated as independence
};

/// FCI over every column of the table: stable adjacency search, unshielded
/// colliders, Possible-D-SEP pruning, then orientation rules R1-R4 and R8-R10.
FciResult fci_discover(const DiscreteTable& table, const FciOptions& options = {});

/// Nodes adjacent to y, plus every other node with an arrowhead into a node
/// that y points into (y *-> c <-* s).
std::vector<std::size_t> markov_blanket(const Pag& g, std::size_t y);

}  // namespace cicdor::discovery
