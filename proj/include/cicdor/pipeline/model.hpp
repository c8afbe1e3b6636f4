#pragma once

#include <string>
#include <vector>

#include "cicdor/causal/dag.hpp"
#include "cicdor/causal/invariant.hpp"
#include "cicdor/causal/losses.hpp"
#include "cicdor/pipeline/config.hpp"
#include "cicdor/predict/predictor.hpp"
#include "cicdor/representation/disentangle.hpp"
#include "cicdor/representation/embeddings.hpp"
#include "cicdor/representation/gcn.hpp"

namespace cicdor::pipeline {

/// Fixed inputs of one domain: text embeddings, the training graph and the
/// confounder subspace (empty when the branch is off).
struct DomainInputs {
  representation::TextEmbeddings text;
  representation::BipartiteGraph graph;
  Matrix confounders;  // J' x k
  Index num_users() const { return graph.num_users(); }
  Index num_items() const { return graph.num_items(); }
};

struct ModelParams {
  ad::Var w_att_s, w_att_t;  // k x m
  representation::InitialProjection proj_s, proj_t;
  representation::Disentangler enc;
  representation::Discriminator disc;
  causal::AdjacencyDag dag_spe, dag_sha;
  causal::FusionAttention fuse_s, fuse_t;
  predict::PredictorParams pred_s, pred_t;

  static ModelParams init(const predict::PredictorShape& shape, Index num_users, numerics::Rng& rng);
  /// Every trainable tensor under a stable name.
  std::vector<nn::NamedParam> named() const;
  Index k() const { return w_att_s.rows(); }
};

/// Which pieces of the causal path are active on a step.
struct PathSwitches {
  bool invariant_specific = false;  // target specific preferences via the specific DAG
  bool invariant_shared = false;    // shared preferences via the shared DAG
  bool causal_specific = false;     // specific-level SCM loss
  bool causal_shared = false;       // shared-level SCM loss
  bool confounders = true;
};

/// Phase 1 runs every variant on raw preferences without causal losses.
PathSwitches phase_switches(Variant v, int phase);

struct ForwardPass {
  ad::Var user_s, user_t;  // fused preferences, m x k
  ad::Var item_s, item_t;  // graph item embeddings, n x k
  ad::Var domain;          // weighted domain loss
  ad::Var causal;          // undefined when no level is active
  bool domain_clamped = false;
};

ForwardPass forward(const ModelParams& p, const DomainInputs& source, const DomainInputs& target,
                    const PathSwitches& sw, double gamma, double grl_lambda, int gcn_layers,
                    const causal::CausalLossWeights& cw);

/// Pre-sigmoid scores for (user, item) rows of one domain.
ad::Var score_pairs(const ad::Var& users, const ad::Var& items, std::span<const Index> user_rows,
                    std::span<const Index> item_rows, const Matrix& confounders, bool use_confounders,
                    const predict::PredictorParams& pred);

}  // namespace cicdor::pipeline
