#include "cicdor/synthetic/review_corpus.hpp"

#include <cmath>
#include <set>

#include "cicdor/numerics/random.hpp"

namespace cicdor::synthetic {
namespace {

using discovery::PlantedVariable;

PlantedVariable var(std::string name, std::string criterion, std::vector<std::string> pos,
                    std::vector<std::string> neg, char category) {
  return {std::move(name), std::move(criterion), std::move(pos), std::move(neg), category};
}

}  // namespace

std::vector<PlantedVariable> planted_variables() {
  return {
      var("promotional discount", "1 if the review mentions buying at a discount or on sale; -1 if it mentions "
          "paying full price or no discount; 0 otherwise or not mentioned",
          {"big discount", "on sale"}, {"full price", "no discount"}, 'b'),
      var("delivery speed", "1 if delivery is described as fast; -1 if late or slow; 0 otherwise or not mentioned",
          {"arrived fast", "quick delivery"}, {"arrived late", "slow delivery"}, 'b'),
      var("customer service", "1 if the seller or support is praised; -1 if criticised; 0 otherwise or not "
          "mentioned",
          {"helpful support", "great seller"}, {"rude support", "unhelpful seller"}, 'b'),
      var("build quality", "1 if the product is described as sturdy or well made; -1 if flimsy; 0 otherwise or "
          "not mentioned",
          {"solid build", "feels sturdy"}, {"flimsy", "cheaply made"}, 'a'),
      var("battery life", "1 if the battery is said to last long; -1 if it drains quickly; 0 otherwise or not "
          "mentioned",
          {"battery lasts", "long battery"}, {"battery dies", "short battery"}, 'a'),
      var("screen quality", "1 if the display is praised; -1 if it is criticised; 0 otherwise or not mentioned",
          {"sharp screen", "bright display"}, {"dim display", "blurry screen"}, 'a'),
      var("packaging design", "1 if the packaging is praised; -1 if it is criticised; 0 otherwise or not "
          "mentioned",
          {"pretty box", "nice packaging"}, {"plain box", "ugly packaging"}, 'b'),
      var("brand advertising", "1 if the reviewer mentions seeing advertising; -1 if they mention seeing none; 0 "
          "otherwise or not mentioned",
          {"saw the ad", "advert on tv"}, {"never saw an ad", "no advertising"}, 'b'),
  };
}

namespace {

int draw_value(numerics::Rng& rng) {
  const double u = rng.uniform();
  return u < 0.3 ? -1 : u < 0.7 ? 0 : 1;
}

const char* kFiller[] = {"I bought this last month.", "Used it every day.", "Would mention it to friends.",
                         "Took a while to decide.", "Compared a few options first.", "Here are my thoughts."};

}  // namespace

PlantedReviews planted_reviews(std::uint64_t seed, const PlantedReviewOptions& o) {
  PlantedReviews out;
  out.world.variables = planted_variables();
  for (const auto& v : out.world.variables) {
    if (v.category == 'a') out.intrinsic.push_back(v.name);
  }
  for (std::size_t i = 0; i < 3; ++i) out.confounders.push_back(out.world.variables[i].name);
  for (std::size_t i = 6; i < 8; ++i) out.noise.push_back(out.world.variables[i].name);

  numerics::Rng rng(numerics::mix_seed(seed, 0x7e1));
  const std::size_t width = std::to_string(o.users).size();
  for (std::size_t u = 0; u < o.users; ++u) {
    std::string uid = std::to_string(u);
    uid = "u" + std::string(width - uid.size(), '0') + uid;
    std::set<std::size_t> items;
    while (items.size() < o.reviews_per_user) items.insert(rng.index(o.items));
    for (const std::size_t item : items) {
      int v[8];
      for (int c = 0; c < 3; ++c) v[c] = draw_value(rng);
      // Each intrinsic variable follows its paired confounder half of the time.
      for (int i = 0; i < 3; ++i) v[3 + i] = (v[i] != 0 && rng.uniform() < 0.5) ? v[i] : draw_value(rng);
      v[6] = draw_value(rng);
      v[7] = draw_value(rng);
      double logit = 0.0;
      for (int j = 0; j < 6; ++j) logit += o.effect * v[j];
      const bool positive = rng.uniform() < 1.0 / (1.0 + std::exp(-logit));
      const int rating = positive ? 4 + static_cast<int>(rng.index(2)) : 1 + static_cast<int>(rng.index(3));

      std::vector<std::string> parts;
      for (int j = 0; j < 8; ++j) {
        if (v[j] == 0) continue;
        const auto& var = out.world.variables[static_cast<std::size_t>(j)];
        const auto& phrases = v[j] > 0 ? var.positive_phrases : var.negative_phrases;
        parts.push_back("The " + phrases[rng.index(phrases.size())] + " part stood out.");
      }
      parts.push_back(kFiller[rng.index(std::size(kFiller))]);
      rng.shuffle(parts.begin(), parts.end());
      std::string text;
      for (const auto& p : parts) text += (text.empty() ? "" : " ") + p;

      out.events.push_back({uid, "i" + std::to_string(item), rating, text, std::nullopt, o.domain});
    }
  }
  return out;
}

}  // namespace cicdor::synthetic
