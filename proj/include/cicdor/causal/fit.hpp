#pragma once

#include <functional>
#include <vector>

#include "cicdor/causal/losses.hpp"

namespace cicdor::causal {

struct AcyclicityPolicy {
  double tolerance = 1e-6;
  int max_escalations = 5;
  int extra_epochs = 10;
  double factor = 10.0;   // α1 multiplier per escalation
  double lr_decay = 0.5;  // learning-rate multiplier per escalation
};

struct EscalationReport {
  double h = 0.0;        // acyclicity after the last check
  int escalations = 0;   // times α1 was escalated
  bool satisfied = false;
};

/// Post-training acyclicity check: while h > tolerance and escalations remain,
/// multiplies w.alpha1 by policy.factor and calls train_more(extra_epochs).
EscalationReport enforce_acyclicity(const std::function<double()>& h_now, CausalLossWeights& w,
                                    const std::function<void(int)>& train_more,
                                    const AcyclicityPolicy& policy = {});

struct DagFitOptions {
  int epochs = 40;
  int batch_size = 256;
  double learning_rate = 1e-3;
  std::uint64_t seed = 1;
  CausalLossWeights weights;
  AcyclicityPolicy policy;
  Matrix mask;  // optional 2k x 2k 0/1 matrix of trainable entries
};

struct DagFitResult {
  AdjacencyDag dag;
  EscalationReport escalation;
  std::vector<double> epoch_loss;
};

/// Learns one DAG from fixed rows E_att ∥ E_pref (n x 2k) by minibatch Adam on
/// level_causal_loss, followed by the acyclicity escalation policy.
DagFitResult fit_dag(const Matrix& rows, Index k, const DagFitOptions& options);

}  // namespace cicdor::causal
