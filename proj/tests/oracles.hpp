#pragma once

// Independent reference computations used only by tests. Nothing here calls
// into the library code it is used to check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

/// Plain power series sum_{i < terms} M^i / i!, no scaling.
inline Eigen::MatrixXd taylor_expm(const Eigen::MatrixXd& m, int terms = 60) {
  const auto d = m.rows();
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd acc = term;
  for (int i = 1; i < terms; ++i) {
    term = term * m / static_cast<double>(i);
    acc += term;
  }
  return acc;
}

/// DFS cycle search over the directed graph with an edge i -> j wherever
/// a(i, j) != 0 (self-loops count as cycles).
inline bool has_cycle(const Eigen::MatrixXd& a) {
  const int d = static_cast<int>(a.rows());
  std::vector<int> state(d, 0);  // 0 new, 1 on stack, 2 done
  std::function<bool(int)> visit = [&](int u) {
    state[u] = 1;
    for (int v = 0; v < d; ++v) {
      if (a(u, v) == 0.0) continue;
      if (state[v] == 1) return true;
      if (state[v] == 0 && visit(v)) return true;
    }
    state[u] = 2;
    return false;
  };
  for (int u = 0; u < d; ++u) {
    if (state[u] == 0 && visit(u)) return true;
  }
  return false;
}

/// Entropy of Y given the discrete columns, by enumerating the joint table.
inline double conditional_entropy_bits(const std::vector<int>& y,
                                       const std::vector<std::vector<int>>& cols) {
  const std::size_t n = y.size();
  std::vector<std::vector<int>> keys;
  for (std::size_t r = 0; r < n; ++r) {
    std::vector<int> k;
    for (const auto& c : cols) k.push_back(c[r]);
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
  }
  double h = 0.0;
  for (const auto& k : keys) {
    double cnt[2] = {0, 0};
    for (std::size_t r = 0; r < n; ++r) {
      bool match = true;
      for (std::size_t c = 0; c < cols.size(); ++c) match = match && cols[c][r] == k[c];
      if (match) cnt[y[r]] += 1;
    }
    const double tot = cnt[0] + cnt[1];
    for (double c : cnt) {
      if (c > 0) h -= (c / static_cast<double>(n)) * std::log2(c / tot);
    }
  }
  return h;
}

/// Smallest set S with y independent of every other variable given S, found
/// by exhaustive search over subsets of the exact joint distribution.
/// `joint` is indexed in mixed radix over `levels`, first variable most
/// significant.
inline std::vector<std::size_t> exact_markov_blanket(const std::vector<int>& levels,
                                                     const std::vector<double>& joint, std::size_t y,
                                                     double tol = 1e-12) {
  const std::size_t n = levels.size();
  std::vector<std::vector<int>> assignments;
  for (std::size_t idx = 0; idx < joint.size(); ++idx) {
    std::vector<int> a(n);
    std::size_t rest = idx;
    for (std::size_t v = n; v-- > 0;) {
      a[v] = static_cast<int>(rest % static_cast<std::size_t>(levels[v]));
      rest /= static_cast<std::size_t>(levels[v]);
    }
    assignments.push_back(a);
  }
  auto marginal = [&](const std::vector<bool>& keep) {
    std::map<std::vector<int>, double> m;
    for (std::size_t idx = 0; idx < joint.size(); ++idx) {
      std::vector<int> k;
      for (std::size_t v = 0; v < n; ++v) k.push_back(keep[v] ? assignments[idx][v] : -1);
      m[k] += joint[idx];
    }
    return m;
  };
  auto project = [&](const std::vector<int>& a, const std::vector<bool>& keep) {
    std::vector<int> k;
    for (std::size_t v = 0; v < n; ++v) k.push_back(keep[v] ? a[v] : -1);
    return k;
  };
  std::vector<std::size_t> others;
  for (std::size_t v = 0; v < n; ++v)
    if (v != y) others.push_back(v);
  for (std::size_t size = 0; size <= others.size(); ++size) {
    for (std::size_t mask = 0; mask < (std::size_t{1} << others.size()); ++mask) {
      if (static_cast<std::size_t>(__builtin_popcountll(mask)) != size) continue;
      std::vector<bool> in_s(n, false);
      for (std::size_t i = 0; i < others.size(); ++i)
        if (mask >> i & 1U) in_s[others[i]] = true;
      std::vector<bool> ys = in_s, s = in_s, sr(n, true);
      ys[y] = true;
      sr[y] = false;
      const auto p_ys = marginal(ys), p_s = marginal(s), p_sr = marginal(sr);
      bool independent = true;
      for (std::size_t idx = 0; idx < joint.size() && independent; ++idx) {
        const auto& a = assignments[idx];
        const double lhs = joint[idx] * p_s.at(project(a, s));
        const double rhs = p_ys.at(project(a, ys)) * p_sr.at(project(a, sr));
        independent = std::abs(lhs - rhs) <= tol;
      }
      if (independent) {
        std::vector<std::size_t> out;
        for (std::size_t v = 0; v < n; ++v)
          if (in_s[v]) out.push_back(v);
        return out;
      }
    }
  }
  return others;
}

struct RankedMetrics {
  double hr = 0.0;
  double ndcg = 0.0;
};

/// Sorts every (score, item) candidate by score descending then id ascending
/// and scans for the positive; HR@k and NDCG@k of that one table.
inline RankedMetrics sort_and_scan(int positive, const std::vector<std::pair<double, int>>& candidates, int k = 10) {
  auto sorted = candidates;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (std::size_t pos = 0; pos < sorted.size(); ++pos) {
    if (sorted[pos].second != positive) continue;
    if (static_cast<int>(pos) >= k) return {};
    return {1.0, 1.0 / std::log2(static_cast<double>(pos) + 2.0)};
  }
  return {};
}

}  // namespace oracle
