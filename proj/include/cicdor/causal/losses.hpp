#pragma once

#include "cicdor/causal/dag.hpp"

namespace cicdor::causal {

struct CausalLossWeights {
  double alpha1 = 1.0;   // acyclicity
  double alpha2 = 1.0;   // preference -> attribute path
  double alpha3 = 0.1;   // preference nodes are not roots
  double alpha4 = 0.01;  // sparsity
};

inline constexpr double kRootLogEps = 1e-8;

/// Rows E_att ∥ E_pref; both inputs must be n x k.
ad::Var scm_batch(const ad::Var& e_att, const ad::Var& e_pref);

/// (1/N) Σ_i ‖B_i − AᵀB_i‖², computed as ‖B − B A‖² / N.
ad::Var reconstruction_loss(const ad::Var& batch, const ad::Var& a);

struct StructuralLosses {
  ad::Var dag;   // Tr(e^{A∘A}) − 2k
  ad::Var path;  // ‖A[k:2k, 0:k]‖₁
  ad::Var root;  // Σ_{j ≥ k} −log(‖A[:, j]‖₁ + ε)
  ad::Var l1;    // ‖A‖₁
};

StructuralLosses structural_losses(const ad::Var& a, Index k);

/// L_rec + α1 L_dag + α2 L_path + α3 L_root + α4 L_l1.
ad::Var level_causal_loss(const ad::Var& batch, const ad::Var& a, Index k, const CausalLossWeights& w);

/// Sum of the specific-level and shared-level losses.
ad::Var dual_causal_loss(const ad::Var& batch_spe, const ad::Var& a_spe, const ad::Var& batch_sha,
                         const ad::Var& a_sha, Index k, const CausalLossWeights& w);

}  // namespace cicdor::causal
