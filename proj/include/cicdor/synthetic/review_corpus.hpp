#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cicdor/data/corpus.hpp"
#include "cicdor/discovery/mock_llm.hpp"

namespace cicdor::synthetic {

struct PlantedReviewOptions {
  std::string domain = "electronics";
  std::size_t users = 400;
  std::size_t reviews_per_user = 5;
  std::size_t items = 300;
  double effect = 1.0;  // logit weight of each relevant variable on the rating label
};

/// Review corpus with eight planted variables. Three external factors drive
/// both an intrinsic preference variable and the label (confounders), three
/// intrinsic variables drive the label, and two external factors are pure
/// noise. `world` describes all eight for the mock model.
struct PlantedReviews {
  discovery::MockWorld world;
  std::vector<std::string> confounders;
  std::vector<std::string> intrinsic;
  std::vector<std::string> noise;
  std::vector<data::EventRecord> events;
};

/// The eight planted variables: three confounders (category b), three
/// intrinsic (category a), two pure-noise external factors (category b).
std::vector<discovery::PlantedVariable> planted_variables();

PlantedReviews planted_reviews(std::uint64_t seed, const PlantedReviewOptions& options = {});

}  // namespace cicdor::synthetic
