#pragma once

// Minimal reverse-mode differentiation over dense matrices. Every learning
// module builds its losses from these operations; each operation carries its
// analytic vector-Jacobian product.

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "cicdor/numerics/matrix.hpp"

namespace cicdor::ad {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct Node {
  Matrix value;
  Matrix grad;  // empty until something flows in
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward;

  void accumulate(const Matrix& g);
};

/// Handle to a node in the expression graph. Copies share the node.
class Var {
 public:
  Var() = default;

  static Var constant(Matrix value);
  static Var parameter(Matrix value);
  static Var scalar(double value) { return constant(Matrix::Constant(1, 1, value)); }

  const Matrix& value() const { return node_->value; }
  /// Direct access for optimizers; only meaningful on leaves.
  Matrix& mutable_value() { return node_->value; }
  /// Gradient accumulated by backward(); zeros of the right shape if none flowed.
  Matrix grad() const;
  bool has_grad() const { return node_->grad.size() > 0; }
  void zero_grad() { node_->grad.resize(0, 0); }
  bool requires_grad() const { return node_->requires_grad; }

  Index rows() const { return node_->value.rows(); }
  Index cols() const { return node_->value.cols(); }
  double item() const;

  bool defined() const { return static_cast<bool>(node_); }
  const std::shared_ptr<Node>& node() const { return node_; }

  static Var make(Matrix value, std::vector<Var> parents, std::function<void(Node&)> backward);

 private:
  std::shared_ptr<Node> node_;
};

/// Seeds d(root)/d(root) = 1 and propagates to every leaf that requires grad.
/// Leaf gradients accumulate across calls until zero_grad().
void backward(const Var& root);

// Shape-preserving arithmetic.
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var scale(const Var& a, double s);
Var hadamard(const Var& a, const Var& b);
Var add_row(const Var& x, const Var& bias);  // bias is 1 x cols, broadcast over rows
Var relu(const Var& x);
Var abs(const Var& x);  // subgradient sign(0) = 0
Var tanh(const Var& x);
Var sigmoid(const Var& x);
Var log(const Var& x);
Var clamp(const Var& x, double lo, double hi);  // gradient zero where clamped
Var one_minus(const Var& x);

// Linear algebra.
Var matmul(const Var& a, const Var& b);
Var transpose(const Var& a);
Var sparse_left(const SparseMatrix& p, const Var& x);  // p * x with p constant

// Structure.
Var concat_cols(std::span<const Var> parts);
Var concat_rows(std::span<const Var> parts);
Var slice_cols(const Var& x, Index start, Index count);
Var slice_rows(const Var& x, Index start, Index count);
Var gather_rows(const Var& x, std::span<const Index> rows);
Var softmax_rows(const Var& x);
Var zeros_like_cols(const Var& x, Index cols);  // constant zeros with x's row count

// Reductions to 1 x 1.
Var sum(const Var& x);
Var mean(const Var& x);
Var square_sum(const Var& x);
Var abs_sum(const Var& x);  // subgradient sign(0) = 0
Var row_dot(const Var& a, const Var& b);  // rows x 1 of per-row dot products
Var col_sum(const Var& x);  // 1 x cols

/// Gradient reversal: identity forward, backward multiplies by -lambda.
Var grl(const Var& x, double lambda);

/// h(A) = Tr(e^{A∘A}) - d with gradient (e^{A∘A})ᵀ ∘ 2A.
Var acyclicity(const Var& a);

/// sqrt of the sum of squares over every entry of every tensor.
Var global_l2_norm(std::span<const Var> tensors);

inline Var operator+(const Var& a, const Var& b) { return add(a, b); }
inline Var operator-(const Var& a, const Var& b) { return sub(a, b); }
inline Var operator*(double s, const Var& a) { return scale(a, s); }

}  // namespace cicdor::ad
