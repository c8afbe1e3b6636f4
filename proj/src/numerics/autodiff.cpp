#include "cicdor/numerics/autodiff.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "cicdor/numerics/expm.hpp"

namespace cicdor::ad {
namespace {

void require_same_shape(const Var& a, const Var& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch");
  }
}

Node& parent(Node& self, std::size_t i) { return *self.parents[i]; }

}  // namespace

void Node::accumulate(const Matrix& g) {
  if (grad.size() == 0) {
    grad = g;
  } else {
    grad += g;
  }
}

Var Var::constant(Matrix value) {
  Var v;
  v.node_ = std::make_shared<Node>();
  v.node_->value = std::move(value);
  return v;
}

Var Var::parameter(Matrix value) {
  Var v = constant(std::move(value));
  v.node_->requires_grad = true;
  return v;
}

Matrix Var::grad() const {
  if (node_->grad.size() == 0) return Matrix::Zero(rows(), cols());
  return node_->grad;
}

double Var::item() const {
  if (rows() != 1 || cols() != 1) throw std::logic_error("Var::item on non-scalar");
  return node_->value(0, 0);
}

Var Var::make(Matrix value, std::vector<Var> parents, std::function<void(Node&)> backward) {
  Var v = constant(std::move(value));
  for (auto& p : parents) {
    if (p.requires_grad()) v.node_->requires_grad = true;
    v.node_->parents.push_back(p.node_);
  }
  if (v.node_->requires_grad) v.node_->backward = std::move(backward);
  return v;
}

void backward(const Var& root) {
  if (root.rows() != 1 || root.cols() != 1) {
    throw std::invalid_argument("backward: root must be a scalar");
  }
  if (!root.requires_grad()) return;

  // Post-order over nodes that require grad.
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, std::size_t>> stack{{root.node().get(), 0}};
  seen.insert(root.node().get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* p = node->parents[next++].get();
      if (p->requires_grad && !seen.count(p)) {
        seen.insert(p);
        stack.emplace_back(p, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  root.node()->accumulate(Matrix::Ones(1, 1));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* node = *it;
    if (node->backward && node->grad.size() > 0) node->backward(*node);
  }
  // Interior nodes are released with the graph; leaves keep their gradient.
}

Var add(const Var& a, const Var& b) {
  require_same_shape(a, b, "add");
  return Var::make(a.value() + b.value(), {a, b}, [](Node& self) {
    for (std::size_t i = 0; i < 2; ++i) {
      if (parent(self, i).requires_grad) parent(self, i).accumulate(self.grad);
    }
  });
}

Var sub(const Var& a, const Var& b) {
  require_same_shape(a, b, "sub");
  return Var::make(a.value() - b.value(), {a, b}, [](Node& self) {
    if (parent(self, 0).requires_grad) parent(self, 0).accumulate(self.grad);
    if (parent(self, 1).requires_grad) parent(self, 1).accumulate(-self.grad);
  });
}

Var scale(const Var& a, double s) {
  return Var::make(a.value() * s, {a}, [s](Node& self) { parent(self, 0).accumulate(self.grad * s); });
}

Var hadamard(const Var& a, const Var& b) {
  require_same_shape(a, b, "hadamard");
  return Var::make(a.value().cwiseProduct(b.value()), {a, b}, [](Node& self) {
    Node& x = parent(self, 0);
    Node& y = parent(self, 1);
    if (x.requires_grad) x.accumulate(self.grad.cwiseProduct(y.value));
    if (y.requires_grad) y.accumulate(self.grad.cwiseProduct(x.value));
  });
}

Var add_row(const Var& x, const Var& bias) {
  if (bias.rows() != 1 || bias.cols() != x.cols()) {
    throw std::invalid_argument("add_row: bias must be 1 x cols");
  }
  Matrix out = x.value().rowwise() + bias.value().row(0);
  return Var::make(std::move(out), {x, bias}, [](Node& self) {
    if (parent(self, 0).requires_grad) parent(self, 0).accumulate(self.grad);
    if (parent(self, 1).requires_grad) parent(self, 1).accumulate(self.grad.colwise().sum());
  });
}

Var relu(const Var& x) {
  return Var::make(x.value().cwiseMax(0.0), {x}, [](Node& self) {
    Node& in = parent(self, 0);
    in.accumulate((in.value.array() > 0.0).cast<double>().matrix().cwiseProduct(self.grad));
  });
}

Var abs(const Var& x) {
  return Var::make(x.value().cwiseAbs(), {x}, [](Node& self) {
    Node& in = parent(self, 0);
    const Matrix sign = in.value.unaryExpr([](double v) { return double((v > 0) - (v < 0)); });
    in.accumulate(sign.cwiseProduct(self.grad));
  });
}

Var tanh(const Var& x) {
  Matrix out = x.value().array().tanh().matrix();
  return Var::make(out, {x}, [](Node& self) {
    parent(self, 0).accumulate(
        (self.grad.array() * (1.0 - self.value.array().square())).matrix());
  });
}

Var sigmoid(const Var& x) {
  Matrix out = x.value().unaryExpr([](double v) {
    if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
    const double e = std::exp(v);
    return e / (1.0 + e);
  });
  return Var::make(out, {x}, [](Node& self) {
    parent(self, 0).accumulate(
        (self.grad.array() * self.value.array() * (1.0 - self.value.array())).matrix());
  });
}

Var log(const Var& x) {
  return Var::make(x.value().array().log().matrix(), {x}, [](Node& self) {
    Node& in = parent(self, 0);
    in.accumulate((self.grad.array() / in.value.array()).matrix());
  });
}

Var clamp(const Var& x, double lo, double hi) {
  return Var::make(x.value().cwiseMax(lo).cwiseMin(hi), {x}, [lo, hi](Node& self) {
    Node& in = parent(self, 0);
    const auto inside = (in.value.array() > lo && in.value.array() < hi).cast<double>();
    in.accumulate((self.grad.array() * inside).matrix());
  });
}

Var one_minus(const Var& x) {
  return Var::make((1.0 - x.value().array()).matrix(), {x},
                   [](Node& self) { parent(self, 0).accumulate(-self.grad); });
}

Var matmul(const Var& a, const Var& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimension mismatch");
  return Var::make(a.value() * b.value(), {a, b}, [](Node& self) {
    Node& x = parent(self, 0);
    Node& y = parent(self, 1);
    if (x.requires_grad) x.accumulate(self.grad * y.value.transpose());
    if (y.requires_grad) y.accumulate(x.value.transpose() * self.grad);
  });
}

Var transpose(const Var& a) {
  return Var::make(a.value().transpose(), {a},
                   [](Node& self) { parent(self, 0).accumulate(self.grad.transpose()); });
}

Var sparse_left(const SparseMatrix& p, const Var& x) {
  if (p.cols() != x.rows()) throw std::invalid_argument("sparse_left: dimension mismatch");
  Matrix out = p * x.value();
  // The graph keeps its own copy so callers may drop theirs.
  auto pt = std::make_shared<SparseMatrix>(p.transpose());
  return Var::make(std::move(out), {x}, [pt](Node& self) {
    parent(self, 0).accumulate((*pt) * self.grad);
  });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: no inputs");
  const Index rows = parts[0].rows();
  Index cols = 0;
  for (const auto& p : parts) {
    if (p.rows() != rows) throw std::invalid_argument("concat_cols: row mismatch");
    cols += p.cols();
  }
  Matrix out(rows, cols);
  std::vector<Index> offsets;
  Index at = 0;
  for (const auto& p : parts) {
    offsets.push_back(at);
    out.middleCols(at, p.cols()) = p.value();
    at += p.cols();
  }
  return Var::make(std::move(out), std::vector<Var>(parts.begin(), parts.end()),
                   [offsets](Node& self) {
                     for (std::size_t i = 0; i < self.parents.size(); ++i) {
                       Node& in = parent(self, i);
                       if (in.requires_grad) {
                         in.accumulate(self.grad.middleCols(offsets[i], in.value.cols()));
                       }
                     }
                   });
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw std::invalid_argument("concat_rows: no inputs");
  const Index cols = parts[0].cols();
  Index rows = 0;
  for (const auto& p : parts) {
    if (p.cols() != cols) throw std::invalid_argument("concat_rows: column mismatch");
    rows += p.rows();
  }
  Matrix out(rows, cols);
  std::vector<Index> offsets;
  Index at = 0;
  for (const auto& p : parts) {
    offsets.push_back(at);
    out.middleRows(at, p.rows()) = p.value();
    at += p.rows();
  }
  return Var::make(std::move(out), std::vector<Var>(parts.begin(), parts.end()),
                   [offsets](Node& self) {
                     for (std::size_t i = 0; i < self.parents.size(); ++i) {
                       Node& in = parent(self, i);
                       if (in.requires_grad) {
                         in.accumulate(self.grad.middleRows(offsets[i], in.value.rows()));
                       }
                     }
                   });
}

Var slice_cols(const Var& x, Index start, Index count) {
  if (start < 0 || count < 0 || start + count > x.cols()) {
    throw std::out_of_range("slice_cols: range outside matrix");
  }
  return Var::make(x.value().middleCols(start, count), {x}, [start, count](Node& self) {
    Node& in = parent(self, 0);
    Matrix g = Matrix::Zero(in.value.rows(), in.value.cols());
    g.middleCols(start, count) = self.grad;
    in.accumulate(g);
  });
}

Var slice_rows(const Var& x, Index start, Index count) {
  if (start < 0 || count < 0 || start + count > x.rows()) {
    throw std::out_of_range("slice_rows: range outside matrix");
  }
  return Var::make(x.value().middleRows(start, count), {x}, [start, count](Node& self) {
    Node& in = parent(self, 0);
    Matrix g = Matrix::Zero(in.value.rows(), in.value.cols());
    g.middleRows(start, count) = self.grad;
    in.accumulate(g);
  });
}

Var gather_rows(const Var& x, std::span<const Index> rows) {
  Matrix out(static_cast<Index>(rows.size()), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || rows[i] >= x.rows()) throw std::out_of_range("gather_rows: index");
    out.row(static_cast<Index>(i)) = x.value().row(rows[i]);
  }
  std::vector<Index> idx(rows.begin(), rows.end());
  return Var::make(std::move(out), {x}, [idx](Node& self) {
    Node& in = parent(self, 0);
    Matrix g = Matrix::Zero(in.value.rows(), in.value.cols());
    for (std::size_t i = 0; i < idx.size(); ++i) g.row(idx[i]) += self.grad.row(static_cast<Index>(i));
    in.accumulate(g);
  });
}

Var softmax_rows(const Var& x) {
  Matrix out = x.value();
  for (Index r = 0; r < out.rows(); ++r) {
    const double peak = out.row(r).maxCoeff();
    out.row(r) = (out.row(r).array() - peak).exp().matrix();
    out.row(r) /= out.row(r).sum();
  }
  return Var::make(std::move(out), {x}, [](Node& self) {
    const Matrix& s = self.value;
    const Vector inner = s.cwiseProduct(self.grad).rowwise().sum();
    Matrix g = s.cwiseProduct(self.grad.colwise() - inner);
    parent(self, 0).accumulate(g);
  });
}

Var zeros_like_cols(const Var& x, Index cols) { return Var::constant(Matrix::Zero(x.rows(), cols)); }

Var sum(const Var& x) {
  return Var::make(Matrix::Constant(1, 1, x.value().sum()), {x}, [](Node& self) {
    Node& in = parent(self, 0);
    in.accumulate(Matrix::Constant(in.value.rows(), in.value.cols(), self.grad(0, 0)));
  });
}

Var mean(const Var& x) {
  const double n = static_cast<double>(x.value().size());
  if (n == 0) throw std::invalid_argument("mean: empty input");
  return Var::make(Matrix::Constant(1, 1, x.value().sum() / n), {x}, [n](Node& self) {
    Node& in = parent(self, 0);
    in.accumulate(Matrix::Constant(in.value.rows(), in.value.cols(), self.grad(0, 0) / n));
  });
}

Var square_sum(const Var& x) {
  return Var::make(Matrix::Constant(1, 1, x.value().squaredNorm()), {x}, [](Node& self) {
    Node& in = parent(self, 0);
    in.accumulate(2.0 * self.grad(0, 0) * in.value);
  });
}

Var abs_sum(const Var& x) {
  return Var::make(Matrix::Constant(1, 1, x.value().cwiseAbs().sum()), {x}, [](Node& self) {
    Node& in = parent(self, 0);
    const Matrix sign = in.value.unaryExpr([](double v) { return double((v > 0) - (v < 0)); });
    in.accumulate(self.grad(0, 0) * sign);
  });
}

Var col_sum(const Var& x) {
  return Var::make(x.value().colwise().sum(), {x}, [](Node& self) {
    Node& in = parent(self, 0);
    in.accumulate(self.grad.replicate(in.value.rows(), 1));
  });
}

Var row_dot(const Var& a, const Var& b) {
  require_same_shape(a, b, "row_dot");
  Matrix out = a.value().cwiseProduct(b.value()).rowwise().sum();
  return Var::make(std::move(out), {a, b}, [](Node& self) {
    Node& x = parent(self, 0);
    Node& y = parent(self, 1);
    if (x.requires_grad) x.accumulate(y.value.array().colwise() * self.grad.col(0).array());
    if (y.requires_grad) y.accumulate(x.value.array().colwise() * self.grad.col(0).array());
  });
}

Var grl(const Var& x, double lambda) {
  return Var::make(x.value(), {x},
                   [lambda](Node& self) { parent(self, 0).accumulate(-lambda * self.grad); });
}

Var acyclicity(const Var& a) {
  Matrix grad;
  const double h = numerics::acyclicity(a.value(), grad);
  return Var::make(Matrix::Constant(1, 1, h), {a}, [grad](Node& self) {
    parent(self, 0).accumulate(self.grad(0, 0) * grad);
  });
}

Var global_l2_norm(std::span<const Var> tensors) {
  double sq = 0.0;
  for (const auto& t : tensors) sq += t.value().squaredNorm();
  const double norm = std::sqrt(sq);
  return Var::make(Matrix::Constant(1, 1, norm), std::vector<Var>(tensors.begin(), tensors.end()),
                   [norm](Node& self) {
                     if (norm == 0.0) return;  // subgradient 0 at the origin
                     const double g = self.grad(0, 0) / norm;
                     for (std::size_t i = 0; i < self.parents.size(); ++i) {
                       Node& in = parent(self, i);
                       if (in.requires_grad) in.accumulate(g * in.value);
                     }
                   });
}

}  // namespace cicdor::ad
