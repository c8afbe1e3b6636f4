#include "cicdor/causal/invariant.hpp"

#include <cmath>
#include <stdexcept>

namespace cicdor::causal {

ad::Var infer_invariant(const AdjacencyDag& dag, const ad::Var& e_att, bool fixed_point) {
  const Index k = dag.k;
  if (e_att.cols() != k) throw std::invalid_argument("infer_invariant: e_att width is not k");
  if (!fixed_point) return ad::matmul(e_att, dag.attr_to_pref());

  const ad::Var parts[] = {e_att, ad::zeros_like_cols(e_att, k)};
  const ad::Var x = ad::concat_cols(parts);
  ad::Var h = x;
  for (Index i = 0; i < 2 * k; ++i) h = x + ad::matmul(h, dag.a);
  return ad::slice_cols(h, k, k);
}

FusionAttention FusionAttention::init(Index k, numerics::Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(k));
  Matrix w(k, k);
  for (Index i = 0; i < w.size(); ++i) w(i) = rng.uniform(-bound, bound);
  return {ad::Var::parameter(std::move(w)), ad::Var::parameter(Matrix::Zero(k, 1))};
}

void FusionAttention::collect(const std::string& prefix, std::vector<nn::NamedParam>& out) const {
  out.push_back({prefix + ".w", w});
  out.push_back({prefix + ".q", q});
}

Fused fuse_attention(const ad::Var& e_a, const ad::Var& e_b, const FusionAttention& att) {
  if (e_a.rows() != e_b.rows() || e_a.cols() != e_b.cols()) {
    throw std::invalid_argument("fuse_attention: inputs differ in shape");
  }
  const ad::Var scores[] = {ad::matmul(ad::tanh(ad::matmul(e_a, att.w)), att.q),
                            ad::matmul(ad::tanh(ad::matmul(e_b, att.w)), att.q)};
  const ad::Var weights = ad::softmax_rows(ad::concat_cols(scores));
  const ad::Var spread = ad::Var::constant(Matrix::Ones(1, e_a.cols()));
  const ad::Var w_a = ad::matmul(ad::slice_cols(weights, 0, 1), spread);
  const ad::Var w_b = ad::matmul(ad::slice_cols(weights, 1, 1), spread);
  return {ad::hadamard(w_a, e_a) + ad::hadamard(w_b, e_b), weights};
}

}  // namespace cicdor::causal
