#include "cicdor/causal/losses.hpp"

#include <stdexcept>

namespace cicdor::causal {

ad::Var scm_batch(const ad::Var& e_att, const ad::Var& e_pref) {
  if (e_att.rows() != e_pref.rows() || e_att.cols() != e_pref.cols()) {
    throw std::invalid_argument("scm_batch: attribute and preference shapes differ");
  }
  const ad::Var parts[] = {e_att, e_pref};
  return ad::concat_cols(parts);
}

ad::Var reconstruction_loss(const ad::Var& batch, const ad::Var& a) {
  if (batch.cols() != a.rows() || a.rows() != a.cols()) {
    throw std::invalid_argument("reconstruction_loss: batch width does not match A");
  }
  if (batch.rows() == 0) return ad::Var::scalar(0.0);
  const ad::Var residual = batch - ad::matmul(batch, a);
  return ad::scale(ad::square_sum(residual), 1.0 / static_cast<double>(batch.rows()));
}

StructuralLosses structural_losses(const ad::Var& a, Index k) {
  if (a.rows() != 2 * k || a.cols() != 2 * k) throw std::invalid_argument("structural_losses: A is not 2k x 2k");
  StructuralLosses out;
  out.dag = ad::acyclicity(a);
  out.path = ad::abs_sum(ad::slice_rows(ad::slice_cols(a, 0, k), k, k));
  // Column L1 norms of the preference columns as a 1 x k row.
  const ad::Var col_l1 = ad::col_sum(ad::abs(ad::slice_cols(a, k, k)));
  const ad::Var eps = ad::Var::constant(Matrix::Constant(1, k, kRootLogEps));
  out.root = ad::scale(ad::sum(ad::log(col_l1 + eps)), -1.0);
  out.l1 = ad::abs_sum(a);
  return out;
}

ad::Var level_causal_loss(const ad::Var& batch, const ad::Var& a, Index k, const CausalLossWeights& w) {
  const auto s = structural_losses(a, k);
  return reconstruction_loss(batch, a) + ad::scale(s.dag, w.alpha1) + ad::scale(s.path, w.alpha2) +
         ad::scale(s.root, w.alpha3) + ad::scale(s.l1, w.alpha4);
}

ad::Var dual_causal_loss(const ad::Var& batch_spe, const ad::Var& a_spe, const ad::Var& batch_sha,
                         const ad::Var& a_sha, Index k, const CausalLossWeights& w) {
  return level_causal_loss(batch_spe, a_spe, k, w) + level_causal_loss(batch_sha, a_sha, k, w);
}

}  // namespace cicdor::causal
