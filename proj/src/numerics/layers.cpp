#include "cicdor/numerics/layers.hpp"

#include <cmath>
#include <stdexcept>

namespace cicdor::nn {

std::vector<ad::Var> vars_of(const std::vector<NamedParam>& params) {
  std::vector<ad::Var> out;
  out.reserve(params.size());
  for (const auto& p : params) out.push_back(p.var);
  return out;
}

Linear Linear::init(Index in, Index out, numerics::Rng& rng) {
  if (in <= 0 || out <= 0) throw std::invalid_argument("Linear: widths must be positive");
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  Matrix w(in, out);
  Matrix b(1, out);
  for (Index i = 0; i < in; ++i)
    for (Index j = 0; j < out; ++j) w(i, j) = rng.uniform(-bound, bound);
  for (Index j = 0; j < out; ++j) b(0, j) = rng.uniform(-bound, bound);
  return {ad::Var::parameter(std::move(w)), ad::Var::parameter(std::move(b))};
}

Linear Linear::zeros(Index in, Index out) {
  return {ad::Var::parameter(Matrix::Zero(in, out)), ad::Var::parameter(Matrix::Zero(1, out))};
}

void Linear::collect(const std::string& prefix, std::vector<NamedParam>& out) const {
  out.push_back({prefix + ".w", w});
  out.push_back({prefix + ".b", b});
}

Mlp Mlp::init(const std::vector<Index>& widths, numerics::Rng& rng) {
  if (widths.size() < 2) throw std::invalid_argument("Mlp: need at least input and output width");
  Mlp m;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) m.layers.push_back(Linear::init(widths[i], widths[i + 1], rng));
  return m;
}

ad::Var Mlp::operator()(const ad::Var& x) const {
  ad::Var h = x;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    h = layers[i](h);
    if (i + 1 < layers.size()) h = ad::relu(h);
  }
  return h;
}

void Mlp::collect(const std::string& prefix, std::vector<NamedParam>& out) const {
  for (std::size_t i = 0; i < layers.size(); ++i) layers[i].collect(prefix + "." + std::to_string(i), out);
}

}  // namespace cicdor::nn
