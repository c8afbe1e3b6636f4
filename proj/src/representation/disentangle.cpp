#include "cicdor/representation/disentangle.hpp"

#include <algorithm>
#include <stdexcept>

namespace cicdor::representation {

Disentangler Disentangler::init(Index k, numerics::Rng& rng) {
  Disentangler d;
  d.shared = nn::Mlp::init({k, k, k}, rng);
  d.specific_source = nn::Mlp::init({k, k, k}, rng);
  d.specific_target = nn::Mlp::init({k, k, k}, rng);
  return d;
}

void Disentangler::collect(const std::string& prefix, std::vector<nn::NamedParam>& out) const {
  shared.collect(prefix + ".shared", out);
  specific_source.collect(prefix + ".specific_source", out);
  specific_target.collect(prefix + ".specific_target", out);
}

DisentangledPrefs disentangle(const ad::Var& e_u_source, const ad::Var& e_u_target, const Disentangler& enc) {
  if (e_u_source.cols() != e_u_target.cols()) throw std::invalid_argument("disentangle: widths differ");
  return {ad::tanh(enc.shared(e_u_source)), ad::tanh(enc.shared(e_u_target)),
          ad::tanh(enc.specific_source(e_u_source)), ad::tanh(enc.specific_target(e_u_target))};
}

Discriminator Discriminator::init(Index k, numerics::Rng& rng) {
  return {nn::Mlp::init({k, std::max<Index>(1, k / 2), 1}, rng)};
}

void Discriminator::collect(const std::string& prefix, std::vector<nn::NamedParam>& out) const {
  net.collect(prefix, out);
}

namespace {

bool hits_clamp(const Matrix& p) {
  return (p.array() < kProbClamp).any() || (p.array() > 1.0 - kProbClamp).any();
}

// -mean log(p) for label 1, -mean log(1 - p) for label 0, from logits. The
// clamp bounds the value only: the gradient is that of the unclamped
// log-sigmoid, so a saturated discriminator can still be corrected.
ad::Var bce_mean(const ad::Var& logits, const Matrix& p, int label) {
  const Matrix q = label == 1 ? p : (1.0 - p.array()).matrix();
  const double value = -q.array().max(kProbClamp).min(1.0 - kProbClamp).log().mean();
  const double n = static_cast<double>(p.size());
  return ad::Var::make(Matrix::Constant(1, 1, value), {logits}, [p, label, n](ad::Node& self) {
    const double g = self.grad(0, 0);
    if (self.parents[0]->requires_grad) self.parents[0]->accumulate(((p.array() - label) * (g / n)).matrix());
  });
}

}  // namespace

DomainLosses domain_losses(const DisentangledPrefs& prefs, const Discriminator& disc, double gamma,
                           double grl_lambda) {
  if (gamma < 0.0 || gamma > 1.0) throw std::invalid_argument("domain_losses: gamma outside [0, 1]");
  const ad::Var x_sha_s = disc.net(ad::grl(prefs.sha_s, grl_lambda));
  const ad::Var x_sha_t = disc.net(ad::grl(prefs.sha_t, grl_lambda));
  const ad::Var x_spe_s = disc.net(prefs.spe_s);
  const ad::Var x_spe_t = disc.net(prefs.spe_t);
  auto prob = [](const ad::Var& x) { return Matrix((1.0 + (-x.value().array()).exp()).inverse()); };
  const Matrix p_sha_s = prob(x_sha_s), p_sha_t = prob(x_sha_t), p_spe_s = prob(x_spe_s), p_spe_t = prob(x_spe_t);

  DomainLosses out;
  out.sha_s = bce_mean(x_sha_s, p_sha_s, 0);
  out.sha_t = bce_mean(x_sha_t, p_sha_t, 1);
  out.spe_s = bce_mean(x_spe_s, p_spe_s, 0);
  out.spe_t = bce_mean(x_spe_t, p_spe_t, 1);
  out.total = ad::scale(out.sha_s + out.spe_s, gamma) + ad::scale(out.sha_t + out.spe_t, 1.0 - gamma);
  out.clamped = hits_clamp(p_sha_s) || hits_clamp(p_sha_t) || hits_clamp(p_spe_s) || hits_clamp(p_spe_t);
  return out;
}

}  // namespace cicdor::representation
