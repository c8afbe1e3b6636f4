#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cicdor/causal/fit.hpp"
#include "cicdor/data/splits.hpp"
#include "cicdor/pipeline/checkpoint.hpp"
#include "cicdor/pipeline/config.hpp"
#include "cicdor/pipeline/model.hpp"

namespace cicdor::pipeline {

struct TrainingSet {
  DomainInputs source;
  DomainInputs target;
  std::vector<data::LabeledPair> pairs_s;
  std::vector<data::LabeledPair> pairs_t;
};

struct TrainReport {
  std::vector<double> epoch_loss;  // mean step loss per epoch, phase 1 then phase 2
  causal::EscalationReport escalation;
  causal::CausalLossWeights final_causal;  // after any α1 escalation
  Checkpoint phase1;                      // parameters at the end of phase 1
};

/// Loss became non-finite. Carries the parameters at the end of the last
/// epoch whose every step stayed finite.
class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(int epoch, Checkpoint last_finite);
  int epoch() const { return epoch_; }
  const Checkpoint& last_finite() const { return last_finite_; }

 private:
  int epoch_;
  Checkpoint last_finite_;
};

using ProgressFn = std::function<void(int phase, int epoch, double loss)>;

/// Phase 1: target and source recommendation, domain and norm losses on raw
/// preferences. Phase 2 adds β2 times the dual-level causal loss and routes
/// predictions through the invariant preferences, as the variant allows.
/// Recommendation losses enter as per-batch means. Ends with the acyclicity
/// escalation policy on the DAGs in use.
TrainReport train_two_phase(ModelParams& params, const TrainingSet& data, const RunConfig& config,
                            std::uint64_t seed, const ProgressFn& progress = {});

/// Names of parameters that receive no gradient under `sw` (the DAG of each
/// inactive level). They are also left out of the norm penalty.
std::vector<std::string> frozen_parameters(const PathSwitches& sw);

}  // namespace cicdor::pipeline
