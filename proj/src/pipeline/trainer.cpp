#include "cicdor/pipeline/trainer.hpp"

#include <algorithm>
#include <cmath>

#include "cicdor/numerics/adam.hpp"

namespace cicdor::pipeline {

TrainingDiverged::TrainingDiverged(int epoch, Checkpoint last_finite)
    : std::runtime_error("training diverged: non-finite loss in epoch " + std::to_string(epoch)),
      epoch_(epoch),
      last_finite_(std::move(last_finite)) {}

std::vector<std::string> frozen_parameters(const PathSwitches& sw) {
  std::vector<std::string> out;
  if (!sw.invariant_specific && !sw.causal_specific) out.push_back("dag_spe");
  if (!sw.invariant_shared && !sw.causal_shared) out.push_back("dag_sha");
  return out;
}

namespace {

struct Batch {
  std::vector<Index> users, items;
  Matrix labels;
};

Batch take(const std::vector<data::LabeledPair>& pairs, const std::vector<std::size_t>& order, std::size_t from,
           std::size_t count) {
  Batch b;
  const std::size_t end = std::min(order.size(), from + count);
  b.labels.resize(static_cast<Index>(end > from ? end - from : 0), 1);
  for (std::size_t i = from; i < end; ++i) {
    const auto& p = pairs[order[i]];
    b.users.push_back(p.user);
    b.items.push_back(p.item);
    b.labels(static_cast<Index>(i - from), 0) = p.label;
  }
  return b;
}

ad::Var mean_rec_loss(const ad::Var& logits, const Matrix& labels) {
  return ad::scale(predict::rec_loss(ad::sigmoid(logits), labels), 1.0 / static_cast<double>(labels.rows()));
}

class Trainer {
 public:
  Trainer(ModelParams& p, const TrainingSet& data, const RunConfig& cfg, std::uint64_t seed, const ProgressFn& progress)
      : p_(p), data_(data), cfg_(cfg), progress_(progress), rng_(numerics::mix_seed(seed, 0x7261696eULL)),
        named_(p.named()), adam_(nn::vars_of(named_), numerics::AdamOptions{cfg.learning_rate}) {
    causal_ = cfg.causal;
    order_t_.resize(data.pairs_t.size());
    order_s_.resize(data.pairs_s.size());
    for (std::size_t i = 0; i < order_t_.size(); ++i) order_t_[i] = i;
    for (std::size_t i = 0; i < order_s_.size(); ++i) order_s_[i] = i;
  }

  void run_epoch(int phase) {
    PathSwitches sw = phase_switches(cfg_.variant, phase);
    if (!cfg_.invariant_training) sw.invariant_specific = sw.invariant_shared = false;
    const auto frozen = frozen_parameters(sw);
    std::vector<ad::Var> norm_params;
    for (const auto& np : named_)
      if (std::find(frozen.begin(), frozen.end(), np.name) == frozen.end()) norm_params.push_back(np.var);
    predict::LossWeights w = cfg_.loss;
    if (phase < 2) w.beta2 = 0.0;

    rng_.shuffle(order_t_.begin(), order_t_.end());
    rng_.shuffle(order_s_.begin(), order_s_.end());
    const auto bs = static_cast<std::size_t>(cfg_.batch_size);
    const std::size_t steps = std::max<std::size_t>(1, (order_t_.size() + bs - 1) / bs);
    const std::size_t bs_s = (order_s_.size() + steps - 1) / steps;

    double total = 0.0;
    ++epoch_;
    for (std::size_t step = 0; step < steps; ++step) {
      const auto f = forward(p_, data_.source, data_.target, sw, w.gamma, cfg_.grl_lambda, cfg_.gcn_layers, causal_);
      predict::LossComponents comp;
      comp.domain = f.domain;
      comp.causal = f.causal;
      const Batch bt = take(data_.pairs_t, order_t_, step * bs, bs);
      if (!bt.users.empty()) {
        comp.rec_target = mean_rec_loss(score_pairs(f.user_t, f.item_t, bt.users, bt.items, data_.target.confounders,
                                                    sw.confounders, p_.pred_t),
                                        bt.labels);
      }
      const Batch bsrc = take(data_.pairs_s, order_s_, step * bs_s, bs_s);
      if (!bsrc.users.empty()) {
        comp.rec_source = mean_rec_loss(score_pairs(f.user_s, f.item_s, bsrc.users, bsrc.items,
                                                    data_.source.confounders, sw.confounders, p_.pred_s),
                                        bsrc.labels);
      }
      const ad::Var loss = predict::total_loss(comp, w, norm_params);
      const double value = loss.item();
      if (!std::isfinite(value)) throw TrainingDiverged(epoch_, last_finite_.tensors.empty() ? snapshot(named_) : last_finite_);
      adam_.zero_grad();
      ad::backward(loss);
      adam_.step();
      total += value;
    }
    const double mean = total / static_cast<double>(steps);
    report_.epoch_loss.push_back(mean);
    last_finite_ = snapshot(named_);
    if (progress_) progress_(phase, epoch_, mean);
  }

  double dag_h(const PathSwitches& sw) const {
    double h = 0.0;
    if (sw.causal_specific) h = std::max(h, ad::acyclicity(p_.dag_spe.a).item());
    if (sw.causal_shared) h = std::max(h, ad::acyclicity(p_.dag_sha.a).item());
    return h;
  }

  TrainReport run() {
    last_finite_ = snapshot(named_);
    for (int e = 0; e < cfg_.epochs_phase1; ++e) run_epoch(1);
    report_.phase1 = snapshot(named_);
    for (int e = 0; e < cfg_.epochs_phase2; ++e) run_epoch(2);

    const PathSwitches sw = phase_switches(cfg_.variant, 2);
    if (cfg_.epochs_phase2 > 0 && (sw.causal_specific || sw.causal_shared)) {
      report_.escalation = causal::enforce_acyclicity(
          [&] { return dag_h(sw); }, causal_,
          [&](int epochs) {
            adam_.set_learning_rate(adam_.options().learning_rate * cfg_.acyclicity.lr_decay);
            for (int e = 0; e < epochs; ++e) run_epoch(2);
          },
          cfg_.acyclicity);
    } else {
      report_.escalation.satisfied = true;
    }
    report_.final_causal = causal_;
    return std::move(report_);
  }

 private:
  ModelParams& p_;
  const TrainingSet& data_;
  const RunConfig& cfg_;
  const ProgressFn& progress_;
  numerics::Rng rng_;
  std::vector<nn::NamedParam> named_;
  numerics::Adam adam_;
  causal::CausalLossWeights causal_;
  std::vector<std::size_t> order_t_, order_s_;
  Checkpoint last_finite_;
  TrainReport report_;
  int epoch_ = 0;
};

}  // namespace

TrainReport train_two_phase(ModelParams& params, const TrainingSet& data, const RunConfig& config, std::uint64_t seed,
                            const ProgressFn& progress) {
  if (data.pairs_t.empty()) throw std::invalid_argument("train_two_phase: no target training pairs");
  Trainer t(params, data, config, seed, progress);
  return t.run();
}

}  // namespace cicdor::pipeline
