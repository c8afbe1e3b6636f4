#include "cicdor/numerics/adam.hpp"

#include <cmath>

namespace cicdor::numerics {

Adam::Adam(std::vector<ad::Var> params, AdamOptions options)
    : params_(std::move(params)), options_(options) {
  for (const auto& p : params_) {
    m_.push_back(Matrix::Zero(p.rows(), p.cols()));
    v_.push_back(Matrix::Zero(p.rows(), p.cols()));
  }
}

void Adam::step() {
  ++t_;
  const double c1 = 1.0 - std::pow(options_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(options_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto& p = params_[i];
    if (!p.has_grad()) continue;
    const Matrix g = p.grad();
    m_[i] = options_.beta1 * m_[i] + (1.0 - options_.beta1) * g;
    v_[i] = options_.beta2 * v_[i] + (1.0 - options_.beta2) * g.cwiseProduct(g);
    const Matrix m_hat = m_[i] / c1;
    const Matrix v_hat = v_[i] / c2;
    p.mutable_value().array() -=
        options_.learning_rate * m_hat.array() / (v_hat.array().sqrt() + options_.epsilon);
  }
  zero_grad();
}

void Adam::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

}  // namespace cicdor::numerics
