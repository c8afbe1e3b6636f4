#include "cicdor/synthetic/cross_domain.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cicdor/numerics/matrix.hpp"
#include "cicdor/numerics/random.hpp"
#include "cicdor/synthetic/review_corpus.hpp"

namespace cicdor::synthetic {
namespace {

const char* kRegions[] = {"north", "south", "east", "west"};
const char* kStyles[] = {"crimson", "azure", "amber", "jade", "violet", "ochre", "teal", "scarlet"};
const char* kFiller[] = {"Bought this recently.", "Here is what I think.", "Used it for a few weeks.",
                         "Compared it with others.", "Would mention it to friends."};

struct Items {
  Matrix q;                  // n x d
  std::vector<int> promoted;
  std::vector<int> fast;     // delivery speed, +1 / -1
  std::vector<int> service;  // customer service, +1 / -1
  std::vector<double> log_pop;
  std::vector<int> cluster;  // argmax latent coordinate
};

Items make_items(std::size_t n, int d, double promoted_share, numerics::Rng& rng) {
  Items it;
  it.q.resize(static_cast<Index>(n), d);
  for (std::size_t i = 0; i < n; ++i) {
    for (int c = 0; c < d; ++c) it.q(static_cast<Index>(i), c) = rng.normal();
    it.promoted.push_back(rng.uniform() < promoted_share ? 1 : 0);
    it.fast.push_back(rng.uniform() < 0.5 ? 1 : -1);
    it.service.push_back(rng.uniform() < 0.5 ? 1 : -1);
    it.log_pop.push_back(0.5 * rng.normal());
    Index best = 0;
    it.q.row(static_cast<Index>(i)).maxCoeff(&best);
    it.cluster.push_back(static_cast<int>(best));
  }
  return it;
}

// Promotion counts fully, delivery and service half each; `s` scales the
// promotion part (a user's susceptibility).
double external(const Items& it, std::size_t i, double s) {
  return s * it.promoted[i] + 0.25 * (it.fast[i] + it.service[i]);
}

std::string phrase(const discovery::PlantedVariable& v, int value, numerics::Rng& rng) {
  const auto& list = value > 0 ? v.positive_phrases : v.negative_phrases;
  return "The " + list[rng.index(list.size())] + " part stood out.";
}

}  // namespace

CrossDomainData cross_domain_benchmark(std::uint64_t seed, const CrossDomainOptions& o) {
  CrossDomainData out;
  out.world.variables = planted_variables();
  const auto& vars = out.world.variables;
  numerics::Rng rng(numerics::mix_seed(seed, 0xc405));
  const int d = o.latent;
  const auto m = static_cast<Index>(o.users);

  Matrix attr(m, d);
  for (Index u = 0; u < m; ++u)
    for (int c = 0; c < d; ++c) attr(u, c) = rng.normal();
  std::vector<double> susceptibility(o.users);
  for (auto& s : susceptibility) s = rng.uniform();
  std::vector<std::size_t> own_style(o.users);
  for (auto& s : own_style) s = rng.index(std::size(kStyles));

  Matrix specific(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) specific(r, c) = rng.normal() / std::sqrt(static_cast<double>(d));
  const Matrix map_s = Matrix::Identity(d, d);
  const Matrix map_t = (1.0 - o.domain_specific) * Matrix::Identity(d, d) + o.domain_specific * specific;

  const Items items_s = make_items(o.items_source, d, o.promoted_share, rng);
  const Items items_t = make_items(o.items_target, d, o.promoted_share, rng);

  // Degree drawn per user and shared by both domains, heavy at the low end.
  std::vector<int> degree(o.users);
  for (auto& k : degree) {
    const double x = rng.uniform();
    k = o.min_degree + static_cast<int>(std::floor((o.max_degree - o.min_degree) * x * x * x));
  }
  std::vector<int> sorted = degree;
  std::sort(sorted.begin(), sorted.end());
  const int high_cut = sorted[sorted.size() * 3 / 4];

  const std::size_t width = std::to_string(o.users).size();
  auto emit = [&](const Items& items, const Matrix& map, const std::string& domain, std::vector<data::EventRecord>& sink) {
    const auto n = static_cast<std::size_t>(items.q.rows());
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    for (Index u = 0; u < m; ++u) {
      std::string uid = std::to_string(u);
      uid = "u" + std::string(width - uid.size(), '0') + uid;
      const RowVector pu = attr.row(u) * map;
      const Index fav = [&] {
        Index best = 0;
        pu.maxCoeff(&best);
        return best;
      }();
      const bool high = degree[static_cast<std::size_t>(u)] >= high_cut;
      // Gumbel top-k over exposure logits.
      std::vector<std::pair<double, std::size_t>> keys;
      std::vector<double> pref(n);
      for (std::size_t i = 0; i < n; ++i) {
        pref[i] = scale * pu.dot(items.q.row(static_cast<Index>(i)));
        const double exposure = pref[i] + o.confounding * external(items, i, susceptibility[static_cast<std::size_t>(u)]) +
                                items.log_pop[i];
        const double g = -std::log(-std::log(std::max(rng.uniform(), 1e-300)));
        keys.emplace_back(exposure + g, i);
      }
      const auto k = std::min<std::size_t>(static_cast<std::size_t>(degree[static_cast<std::size_t>(u)]), n);
      std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(k), keys.end(),
                        [](const auto& a, const auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
      for (std::size_t r = 0; r < k; ++r) {
        const std::size_t i = keys[r].second;
        const double score = pref[i] + o.confounding * 0.5 * external(items, i, 1.0) + o.rating_noise * rng.normal();
        const bool positive = score > 0.3;
        const int rating = positive ? 4 + static_cast<int>(rng.index(2)) : 1 + static_cast<int>(rng.index(3));

        std::vector<std::string> parts;
        if (items.promoted[i]) parts.push_back(phrase(vars[0], 1, rng));
        else if (rng.uniform() < 0.3) parts.push_back(phrase(vars[0], -1, rng));
        if (rng.uniform() < 0.6) parts.push_back(phrase(vars[1], items.fast[i], rng));
        if (rng.uniform() < 0.6) parts.push_back(phrase(vars[2], items.service[i], rng));
        const int quality = pref[i] > 0.5 ? 1 : pref[i] < -0.5 ? -1 : 0;
        if (quality != 0) parts.push_back(phrase(vars[3 + static_cast<std::size_t>(items.cluster[i] % 3)], quality, rng));
        if (rng.uniform() < 0.2) parts.push_back(phrase(vars[6], rng.uniform() < 0.5 ? 1 : -1, rng));
        if (rng.uniform() < 0.2) parts.push_back(phrase(vars[7], rng.uniform() < 0.5 ? 1 : -1, rng));
        const bool faithful = !high && rng.uniform() < o.style_reliability;
        const auto misleading = static_cast<std::size_t>(fav + 1 + static_cast<Index>(own_style[static_cast<std::size_t>(u)]) % (d - 1)) % static_cast<std::size_t>(d);
        const auto style = faithful ? static_cast<std::size_t>(fav)
                       : high       ? (o.reversed_style ? misleading : own_style[static_cast<std::size_t>(u)])
                                    : rng.index(std::size(kStyles));
        parts.push_back(std::string("Very ") + kStyles[style] + " overall.");
        parts.push_back(kFiller[rng.index(std::size(kFiller))]);
        rng.shuffle(parts.begin(), parts.end());
        std::string text;
        for (const auto& p : parts) text += (text.empty() ? "" : " ") + p;
        sink.push_back({uid, domain.substr(0, 1) + std::to_string(i), rating, text,
                        std::string(kRegions[static_cast<std::size_t>(u) % std::size(kRegions)]), domain});
      }
    }
  };
  emit(items_s, map_s, "books", out.source);
  emit(items_t, map_t, "movies", out.target);
  return out;
}

}  // namespace cicdor::synthetic
