#pragma once

#include <string>
#include <vector>

#include "cicdor/numerics/autodiff.hpp"
#include "cicdor/numerics/random.hpp"

namespace cicdor::nn {

/// A trainable tensor with a stable name, used for checkpoints and for
/// assembling optimizer parameter lists.
struct NamedParam {
  std::string name;
  ad::Var var;
};

std::vector<ad::Var> vars_of(const std::vector<NamedParam>& params);

/// y = x W + b with W stored in x out.
struct Linear {
  ad::Var w;
  ad::Var b;

  /// Uniform(-1/sqrt(in), 1/sqrt(in)) for weights and bias.
  static Linear init(Index in, Index out, numerics::Rng& rng);
  static Linear zeros(Index in, Index out);

  ad::Var operator()(const ad::Var& x) const { return ad::add_row(ad::matmul(x, w), b); }
  Index in() const { return w.rows(); }
  Index out() const { return w.cols(); }
  void collect(const std::string& prefix, std::vector<NamedParam>& out) const;
};

/// Affine layers with ReLU between them and no activation after the last.
struct Mlp {
  std::vector<Linear> layers;

  /// widths = {in, hidden..., out}.
  static Mlp init(const std::vector<Index>& widths, numerics::Rng& rng);

  ad::Var operator()(const ad::Var& x) const;
  void collect(const std::string& prefix, std::vector<NamedParam>& out) const;
};

}  // namespace cicdor::nn
