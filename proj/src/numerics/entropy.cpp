#include "cicdor/numerics/entropy.hpp"

#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace cicdor::numerics {

double conditional_entropy(std::span<const int> y, const std::vector<std::vector<int>>& columns) {
  std::vector<std::size_t> rows(y.size());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return conditional_entropy(y, columns, rows);
}

double conditional_entropy(std::span<const int> y, const std::vector<std::vector<int>>& columns,
                           std::span<const std::size_t> rows) {
  if (rows.empty()) throw std::invalid_argument("conditional_entropy: empty input");
  for (const auto& col : columns) {
    if (col.size() != y.size()) throw std::invalid_argument("conditional_entropy: length mismatch");
  }

  // Stratum key -> (count of y=0, count of y=1).
  std::map<std::vector<int>, std::pair<double, double>> strata;
  std::vector<int> key(columns.size());
  for (const std::size_t r : rows) {
    if (r >= y.size()) throw std::out_of_range("conditional_entropy: row index");
    const int label = y[r];
    if (label != 0 && label != 1) throw std::invalid_argument("conditional_entropy: y must be binary");
    for (std::size_t c = 0; c < columns.size(); ++c) key[c] = columns[c][r];
    auto& cell = strata[key];
    (label == 0 ? cell.first : cell.second) += 1.0;
  }

  const double n = static_cast<double>(rows.size());
  double h = 0.0;
  for (const auto& [_, cell] : strata) {
    const double total = cell.first + cell.second;
    double hz = 0.0;
    for (const double c : {cell.first, cell.second}) {
      if (c > 0.0) {
        const double p = c / total;
        hz -= p * std::log2(p);
      }
    }
    h += (total / n) * hz;
  }
  return h;
}

}  // namespace cicdor::numerics
