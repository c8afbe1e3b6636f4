#include "cicdor/discovery/ci.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_map>

#include <boost/math/distributions/chi_squared.hpp>

namespace cicdor::discovery {

DiscreteTable::DiscreteTable(std::vector<std::vector<int>> columns) {
  rows_ = columns.empty() ? 0 : columns.front().size();
  for (auto& col : columns) {
    if (col.size() != rows_) throw std::invalid_argument("DiscreteTable: columns differ in length");
    std::map<int, int> code;
    for (int v : col) code.emplace(v, 0);
    int next = 0;
    for (auto& [_, c] : code) c = next++;
    std::vector<int> coded(col.size());
    for (std::size_t i = 0; i < col.size(); ++i) coded[i] = code[col[i]];
    codes_.push_back(std::move(coded));
    levels_.push_back(next);
  }
}

CiResult g2_test(const DiscreteTable& t, std::size_t x, std::size_t y, std::span<const std::size_t> z,
                 double alpha) {
  const int lx = t.levels(x);
  const int ly = t.levels(y);
  // Stratum key in mixed radix over the conditioning columns.
  std::vector<std::uint64_t> key(t.rows(), 0);
  for (const std::size_t c : z) {
    const auto& codes = t.codes(c);
    const auto radix = static_cast<std::uint64_t>(t.levels(c));
    for (std::size_t r = 0; r < t.rows(); ++r) key[r] = key[r] * radix + static_cast<std::uint64_t>(codes[r]);
  }
  std::unordered_map<std::uint64_t, std::vector<double>> tables;
  const auto& cx = t.codes(x);
  const auto& cy = t.codes(y);
  for (std::size_t r = 0; r < t.rows(); ++r) {
    auto& tab = tables[key[r]];
    if (tab.empty()) tab.assign(static_cast<std::size_t>(lx * ly), 0.0);
    tab[static_cast<std::size_t>(cx[r] * ly + cy[r])] += 1.0;
  }

  CiResult res;
  double g2 = 0.0;
  std::vector<double> rx(static_cast<std::size_t>(lx));
  std::vector<double> ry(static_cast<std::size_t>(ly));
  for (const auto& [_, tab] : tables) {
    std::fill(rx.begin(), rx.end(), 0.0);
    std::fill(ry.begin(), ry.end(), 0.0);
    double n = 0.0;
    for (int i = 0; i < lx; ++i) {
      for (int j = 0; j < ly; ++j) {
        const double c = tab[static_cast<std::size_t>(i * ly + j)];
        rx[static_cast<std::size_t>(i)] += c;
        ry[static_cast<std::size_t>(j)] += c;
        n += c;
      }
    }
    for (int i = 0; i < lx; ++i) {
      for (int j = 0; j < ly; ++j) {
        const double c = tab[static_cast<std::size_t>(i * ly + j)];
        if (c > 0) g2 += c * std::log(c * n / (rx[static_cast<std::size_t>(i)] * ry[static_cast<std::size_t>(j)]));
      }
    }
    const auto nzx = std::count_if(rx.begin(), rx.end(), [](double v) { return v > 0; });
    const auto nzy = std::count_if(ry.begin(), ry.end(), [](double v) { return v > 0; });
    res.df += static_cast<int>((nzx - 1) * (nzy - 1));
  }
  res.statistic = std::max(0.0, 2.0 * g2);
  if (res.df <= 0) {
    res.degenerate = true;
    res.p_value = 1.0;
    res.independent = true;
    return res;
  }
  const boost::math::chi_squared dist(res.df);
  res.p_value = boost::math::cdf(boost::math::complement(dist, res.statistic));
  res.independent = res.p_value > alpha;
  return res;
}

CiFilterResult ci_filter(const std::vector<std::vector<int>>& candidates, const std::vector<int>& y,
                         double alpha, std::size_t max_condition) {
  if (candidates.empty()) throw std::invalid_argument("ci_filter: no candidate columns");
  std::vector<std::vector<int>> cols = candidates;
  cols.push_back(y);
  const DiscreteTable t(std::move(cols));
  const std::size_t y_col = candidates.size();
  if (t.constant(y_col)) throw std::invalid_argument("ci_filter: target column is constant");

  CiFilterResult out;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    if (t.constant(c)) {
      out.constant.push_back(c);
      continue;
    }
    const std::size_t from = out.kept.size() > max_condition ? out.kept.size() - max_condition : 0;
    const std::vector<std::size_t> z(out.kept.begin() + static_cast<std::ptrdiff_t>(from), out.kept.end());
    const auto r = g2_test(t, c, y_col, z, alpha);
    if (r.degenerate) out.degenerate.push_back(c);
    if (!r.independent) out.kept.push_back(c);
  }
  return out;
}

}  // namespace cicdor::discovery
