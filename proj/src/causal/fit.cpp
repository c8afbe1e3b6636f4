#include "cicdor/causal/fit.hpp"

#include <numeric>
#include <stdexcept>

#include "cicdor/numerics/adam.hpp"
#include "cicdor/numerics/expm.hpp"

namespace cicdor::causal {

EscalationReport enforce_acyclicity(const std::function<double()>& h_now, CausalLossWeights& w,
                                    const std::function<void(int)>& train_more,
                                    const AcyclicityPolicy& policy) {
  EscalationReport r;
  r.h = h_now();
  while (r.h > policy.tolerance && r.escalations < policy.max_escalations) {
    w.alpha1 *= policy.factor;
    ++r.escalations;
    train_more(policy.extra_epochs);
    r.h = h_now();
  }
  r.satisfied = r.h <= policy.tolerance;
  return r;
}

DagFitResult fit_dag(const Matrix& rows, Index k, const DagFitOptions& options) {
  if (rows.cols() != 2 * k) throw std::invalid_argument("fit_dag: rows must be n x 2k");
  if (rows.rows() == 0) throw std::invalid_argument("fit_dag: no rows");
  numerics::Rng rng(options.seed);
  DagFitResult out{AdjacencyDag::init(k, DagLevel::Specific, rng), {}, {}};
  if (options.mask.size()) out.dag.a.mutable_value() = out.dag.a.value().cwiseProduct(options.mask);
  numerics::Adam adam({out.dag.a}, {options.learning_rate});
  CausalLossWeights w = options.weights;

  std::vector<Index> order(static_cast<std::size_t>(rows.rows()));
  std::iota(order.begin(), order.end(), Index{0});
  auto run_epochs = [&](int epochs) {
    for (int e = 0; e < epochs; ++e) {
      rng.shuffle(order.begin(), order.end());
      double total = 0.0;
      for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(options.batch_size)) {
        const std::size_t len = std::min<std::size_t>(options.batch_size, order.size() - start);
        Matrix b(static_cast<Index>(len), rows.cols());
        for (std::size_t i = 0; i < len; ++i) b.row(static_cast<Index>(i)) = rows.row(order[start + i]);
        const ad::Var a = options.mask.size() ? ad::hadamard(out.dag.a, ad::Var::constant(options.mask)) : out.dag.a;
        const ad::Var loss = level_causal_loss(ad::Var::constant(std::move(b)), a, k, w);
        ad::backward(loss);
        adam.step();
        total += loss.item() * static_cast<double>(len);
      }
      out.epoch_loss.push_back(total / static_cast<double>(rows.rows()));
    }
  };
  run_epochs(options.epochs);
  auto escalate = [&](int epochs) {
    adam.set_learning_rate(adam.options().learning_rate * options.policy.lr_decay);
    run_epochs(epochs);
  };
  out.escalation = enforce_acyclicity([&] { return numerics::acyclicity(out.dag.a.value()); }, w, escalate,
                                      options.policy);
  return out;
}

}  // namespace cicdor::causal
