#pragma once

#include <span>
#include <string>
#include <vector>

namespace cicdor::discovery {

/// Discrete columns of equal length. Values are arbitrary ints; each column is
/// re-coded to 0..levels-1 internally.
class DiscreteTable {
 public:
  DiscreteTable() = default;
  explicit DiscreteTable(std::vector<std::vector<int>> columns);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return codes_.size(); }
  int levels(std::size_t col) const { return levels_[col]; }
  const std::vector<int>& codes(std::size_t col) const { return codes_[col]; }
  bool constant(std::size_t col) const { return levels_[col] <= 1; }

 private:
  std::vector<std::vector<int>> codes_;
  std::vector<int> levels_;
  std::size_t rows_ = 0;
};

struct CiResult {
  double statistic = 0.0;  // G²
  int df = 0;
  double p_value = 1.0;
  bool independent = true;
  bool degenerate = false;  // no degrees of freedom left (empty or single-level cells)
};

/// G² likelihood-ratio test of x ⟂ y | z. Degrees of freedom are summed per
/// stratum of z as (nonzero x levels − 1)(nonzero y levels − 1); a test with
/// zero degrees of freedom reports independence and is flagged degenerate.
CiResult g2_test(const DiscreteTable& t, std::size_t x, std::size_t y, std::span<const std::size_t> z,
                 double alpha = 0.05);

struct CiFilterResult {
  std::vector<std::size_t> kept;      // indices into the candidate list, in proposal order
  std::vector<std::size_t> constant;  // skipped as independent because the column is constant
  std::vector<std::size_t> degenerate;
};

/// Walks candidates in order and keeps those dependent on y given the (at most
/// `max_condition`) most recently kept candidates.
CiFilterResult ci_filter(const std::vector<std::vector<int>>& candidates, const std::vector<int>& y,
                         double alpha = 0.05, std::size_t max_condition = 3);

}  // namespace cicdor::discovery
