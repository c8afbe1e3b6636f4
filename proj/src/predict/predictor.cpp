#include "cicdor/predict/predictor.hpp"

#include <cmath>
#include <stdexcept>

namespace cicdor::predict {

using ad::Var;

PredictorParams PredictorParams::init(const PredictorShape& s, numerics::Rng& rng) {
  auto square = [&](Index n) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(n));
    Matrix m(n, n);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-bound, bound);
    return Var::parameter(std::move(m));
  };
  PredictorParams p;
  p.w_u = square(s.k);
  p.w_uc = square(s.k);
  p.w_v = square(s.k);
  p.w_vc = square(s.k);
  p.fc = nn::Linear::init(3 * s.k, s.k_in, rng);
  p.mlp = nn::Mlp::init({s.k_in, s.hidden, s.k_out, 1}, rng);
  return p;
}

void PredictorParams::collect(const std::string& prefix, std::vector<nn::NamedParam>& out) const {
  out.push_back({prefix + ".w_u", w_u});
  out.push_back({prefix + ".w_uc", w_uc});
  out.push_back({prefix + ".w_v", w_v});
  out.push_back({prefix + ".w_vc", w_vc});
  fc.collect(prefix + ".fc", out);
  mlp.collect(prefix + ".mlp", out);
}

Var selection_weights(const Var& e_u, const Var& e_v, const Var& c, const PredictorParams& p) {
  const Var su = ad::softmax_rows(ad::matmul(ad::matmul(e_u, p.w_u), ad::transpose(ad::matmul(c, p.w_uc))));
  const Var sv = ad::softmax_rows(ad::matmul(ad::matmul(e_v, p.w_v), ad::transpose(ad::matmul(c, p.w_vc))));
  return ad::scale(ad::add(su, sv), 0.5);
}

Var backdoor_input(const Var& e_u, const Var& e_v, const Var& c, const PredictorParams& p) {
  Var s;
  if (c.defined()) {
    const double prior = 1.0 / static_cast<double>(c.rows());
    s = ad::scale(ad::matmul(selection_weights(e_u, e_v, c, p), c), prior);
  } else {
    s = ad::zeros_like_cols(e_u, e_u.cols());
  }
  const std::vector<Var> parts{e_u, e_v, s};
  return p.fc(ad::concat_cols(parts));
}

Var predict_logit(const Var& theta_in, const PredictorParams& p) { return p.mlp(theta_in); }

Var predict(const Var& theta_in, const PredictorParams& p) { return ad::sigmoid(predict_logit(theta_in, p)); }

Var rec_loss(const Var& predictions, const Matrix& labels) {
  if (predictions.rows() != labels.rows() || predictions.cols() != labels.cols()) {
    throw std::invalid_argument("rec_loss: " + std::to_string(predictions.rows()) + " predictions for " +
                                std::to_string(labels.rows()) + " labels");
  }
  const Var y = Var::constant(labels);
  const Var q = ad::clamp(predictions, kPredClamp, 1.0 - kPredClamp);
  const Var ll = ad::add(ad::hadamard(y, ad::log(q)), ad::hadamard(ad::one_minus(y), ad::log(ad::one_minus(q))));
  return ad::scale(ad::sum(ll), -1.0);
}

Var total_loss(const LossComponents& c, const LossWeights& w, std::span<const Var> params) {
  Var total = c.rec_target;
  auto add = [&](const Var& term, double weight) {
    if (!term.defined() || weight == 0.0) return;
    total = ad::add(total, ad::scale(term, weight));
  };
  add(c.rec_source, w.beta1);
  add(c.causal, w.beta2);
  add(c.domain, w.beta3);
  if (w.beta4 != 0.0 && !params.empty()) add(ad::global_l2_norm(params), w.beta4);
  return total;
}

}  // namespace cicdor::predict
