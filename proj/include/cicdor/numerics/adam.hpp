#pragma once

#include <vector>

#include "cicdor/numerics/autodiff.hpp"

namespace cicdor::numerics {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Adaptive-moment optimizer over a fixed list of parameter leaves. Moment
/// state is keyed by position in the list.
class Adam {
 public:
  Adam(std::vector<ad::Var> params, AdamOptions options = {});

  /// Applies one update from the accumulated gradients, then clears them.
  /// Parameters without an incoming gradient are left untouched.
  void step();
  void zero_grad();

  void set_learning_rate(double lr) { options_.learning_rate = lr; }
  const AdamOptions& options() const { return options_; }
  long steps_taken() const { return t_; }

 private:
  std::vector<ad::Var> params_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  AdamOptions options_;
  long t_ = 0;
};

}  // namespace cicdor::numerics
