#include "cicdor/synthetic/discrete_scm.hpp"

#include <cmath>

#include "cicdor/numerics/random.hpp"

namespace cicdor::synthetic {

std::size_t DiscreteScm::config_of(std::size_t v, const std::vector<int>& values) const {
  std::size_t cfg = 0;
  for (const std::size_t p : parents[v]) cfg = cfg * static_cast<std::size_t>(levels[p]) + static_cast<std::size_t>(values[p]);
  return cfg;
}

DiscreteScm random_discrete_scm(std::uint64_t seed, const DiscreteScmOptions& o) {
  numerics::Rng rng(numerics::mix_seed(seed, 0x5c3));
  DiscreteScm scm;
  const std::size_t n = o.nodes;
  scm.levels.assign(n, 2);
  scm.parents.resize(n);
  scm.cpt.resize(n);
  std::vector<std::size_t> degree(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    for (std::size_t p = 0; p < v; ++p) {
      if (scm.parents[v].size() >= o.max_parents) break;
      if (rng.uniform() < o.edge_probability) {
        scm.parents[v].push_back(p);
        ++degree[v];
        ++degree[p];
      }
    }
    std::vector<double> w;
    for (std::size_t i = 0; i < scm.parents[v].size(); ++i) {
      const double mag = rng.uniform(o.min_weight, o.max_weight);
      w.push_back(rng.uniform() < 0.5 ? -mag : mag);
    }
    const double bias = rng.uniform(-0.5, 0.5);
    const std::size_t configs = std::size_t{1} << scm.parents[v].size();
    for (std::size_t cfg = 0; cfg < configs; ++cfg) {
      double logit = bias;
      for (std::size_t i = 0; i < w.size(); ++i) {
        const std::size_t bit = (cfg >> (w.size() - 1 - i)) & 1U;
        logit += w[i] * (bit ? 1.0 : -1.0);
      }
      const double p1 = 1.0 / (1.0 + std::exp(-logit));
      scm.cpt[v].push_back({1.0 - p1, p1});
    }
  }
  std::vector<std::size_t> connected;
  for (std::size_t v = 0; v < n; ++v)
    if (degree[v] > 0) connected.push_back(v);
  scm.target = connected.empty() ? rng.index(n) : connected[rng.index(connected.size())];
  return scm;
}

std::vector<std::vector<int>> sample_columns(const DiscreteScm& scm, std::size_t rows, std::uint64_t seed) {
  numerics::Rng rng(numerics::mix_seed(seed, 0x5a3));
  const std::size_t n = scm.size();
  std::vector<std::vector<int>> cols(n, std::vector<int>(rows));
  std::vector<int> values(n);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t v = 0; v < n; ++v) {
      const auto& probs = scm.cpt[v][scm.config_of(v, values)];
      double u = rng.uniform();
      int x = 0;
      while (x + 1 < static_cast<int>(probs.size()) && u >= probs[static_cast<std::size_t>(x)]) {
        u -= probs[static_cast<std::size_t>(x)];
        ++x;
      }
      values[v] = x;
      cols[v][r] = x;
    }
  }
  return cols;
}

}  // namespace cicdor::synthetic
