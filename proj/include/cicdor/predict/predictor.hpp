#pragma once

#include <span>
#include <string>
#include <vector>

#include "cicdor/numerics/autodiff.hpp"
#include "cicdor/numerics/layers.hpp"

namespace cicdor::predict {

struct PredictorShape {
  Index k = 64;
  Index k_in = 128;
  Index hidden = 64;
  Index k_out = 8;
};

/// Per-domain prediction head: confounder selection matrices, the fusion
/// layer into k_in, and the MLP down to one logit.
struct PredictorParams {
  ad::Var w_u, w_uc, w_v, w_vc;  // k x k
  nn::Linear fc;                 // 3k -> k_in
  nn::Mlp mlp;                   // k_in -> hidden -> k_out -> 1

  static PredictorParams init(const PredictorShape& shape, numerics::Rng& rng);
  void collect(const std::string& prefix, std::vector<nn::NamedParam>& out) const;
  Index k() const { return w_u.rows(); }
};

/// psi = (softmax_c((e_u W_u)·(c W_uc)) + softmax_c((e_v W_v)·(c W_vc))) / 2,
/// one row of J weights per (user, item) row.
ad::Var selection_weights(const ad::Var& e_u, const ad::Var& e_v, const ad::Var& c, const PredictorParams& p);

/// Theta_in = fc(e_u ∥ e_v ∥ s) with s = sum_c (1/J) psi(c) c. An undefined
/// `c` means the confounder branch is off and s = 0.
ad::Var backdoor_input(const ad::Var& e_u, const ad::Var& e_v, const ad::Var& c, const PredictorParams& p);

/// sigmoid(mlp(Theta_in)), B x 1.
ad::Var predict(const ad::Var& theta_in, const PredictorParams& p);

/// Pre-sigmoid score; ranking by it equals ranking by predict().
ad::Var predict_logit(const ad::Var& theta_in, const PredictorParams& p);

inline constexpr double kPredClamp = 1e-7;

/// Binary cross-entropy summed over the rows, predictions clamped to
/// [1e-7, 1 - 1e-7]. labels is B x 1 of 0/1.
ad::Var rec_loss(const ad::Var& predictions, const Matrix& labels);

struct LossWeights {
  double beta1 = 1.0;   // source recommendation
  double beta2 = 0.5;   // dual-level causal
  double beta3 = 1.0;   // domain classification
  double beta4 = 1e-5;  // parameter norm
  double gamma = 0.5;   // source/target balance in the domain loss
};

struct LossComponents {
  ad::Var rec_target;
  ad::Var rec_source;
  ad::Var causal;
  ad::Var domain;
};

/// L = rec_t + b1 rec_s + b2 causal + b3 domain + b4 ||params||_2. Undefined
/// components count as zero.
ad::Var total_loss(const LossComponents& c, const LossWeights& w, std::span<const ad::Var> params);

}  // namespace cicdor::predict
