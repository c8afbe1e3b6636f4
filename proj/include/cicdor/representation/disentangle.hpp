#pragma once

#include <string>
#include <vector>

#include "cicdor/numerics/layers.hpp"

namespace cicdor::representation {

/// One shared and two domain-specific two-layer encoders (k -> k -> k), tanh
/// on the output.
struct Disentangler {
  nn::Mlp shared;
  nn::Mlp specific_source;
  nn::Mlp specific_target;

  static Disentangler init(Index k, numerics::Rng& rng);
  void collect(const std::string& prefix, std::vector<nn::NamedParam>& out) const;
};

struct DisentangledPrefs {
  ad::Var sha_s;
  ad::Var sha_t;
  ad::Var spe_s;
  ad::Var spe_t;
};

DisentangledPrefs disentangle(const ad::Var& e_u_source, const ad::Var& e_u_target, const Disentangler& enc);

/// k -> k/2 -> 1 with sigmoid output: probability that a preference vector
/// came from the target domain.
struct Discriminator {
  nn::Mlp net;

  static Discriminator init(Index k, numerics::Rng& rng);
  ad::Var operator()(const ad::Var& x) const { return ad::sigmoid(net(x)); }
  void collect(const std::string& prefix, std::vector<nn::NamedParam>& out) const;
};

inline constexpr double kProbClamp = 1e-7;

struct DomainLosses {
  ad::Var sha_s;
  ad::Var sha_t;
  ad::Var spe_s;
  ad::Var spe_t;
  ad::Var total;
  bool clamped = false;  // some probability hit the [1e-7, 1 - 1e-7] clamp
};

/// Binary cross-entropy domain losses, target labelled 1. Shared preferences
/// pass through the gradient reversal layer before the discriminator.
/// total = γ(sha_s + spe_s) + (1 - γ)(sha_t + spe_t).
DomainLosses domain_losses(const DisentangledPrefs& prefs, const Discriminator& disc, double gamma,
                           double grl_lambda = 1.0);

}  // namespace cicdor::representation
