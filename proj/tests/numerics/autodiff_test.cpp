#include <gtest/gtest.h>

#include "cicdor/numerics/adam.hpp"
#include "cicdor/numerics/autodiff.hpp"
#include "cicdor/numerics/param_check.hpp"
#include "cicdor/numerics/random.hpp"

using cicdor::Index;
using cicdor::Matrix;
namespace ad = cicdor::ad;
namespace nm = cicdor::numerics;

namespace {

Matrix random_matrix(nm::Rng& rng, Index r, Index c, double lo = -1, double hi = 1) {
  Matrix m(r, c);
  for (Index i = 0; i < m.size(); ++i) m(i) = rng.uniform(lo, hi);
  return m;
}

// Contract an arbitrary-shaped output with fixed random weights so every
// entry of the output contributes to the scalar under test.
ad::Var contract(const ad::Var& out, std::uint64_t seed) {
  nm::Rng rng(seed);
  return ad::sum(ad::hadamard(out, ad::Var::constant(random_matrix(rng, out.rows(), out.cols()))));
}

void expect_gradients_match(const std::function<ad::Var()>& f, std::vector<ad::Var> params) {
  const auto report = nm::check_parameters(f, std::move(params));
  EXPECT_LT(report.worst.max_rel_error, 1e-6)
      << "tensor " << report.worst_tensor << " analytic " << report.worst.analytic << " numeric "
      << report.worst.numeric;
}

}  // namespace

TEST(Autodiff, ElementwiseAndLinearOps) {
  nm::Rng rng(1);
  auto a = ad::Var::parameter(random_matrix(rng, 3, 4));
  auto b = ad::Var::parameter(random_matrix(rng, 4, 2));
  auto c = ad::Var::parameter(random_matrix(rng, 3, 4));
  auto bias = ad::Var::parameter(random_matrix(rng, 1, 2));
  auto pos = ad::Var::parameter(random_matrix(rng, 3, 4, 0.2, 0.8));
  expect_gradients_match(
      [&] {
        auto h = ad::add_row(ad::matmul(ad::tanh(a + c), b), bias);
        auto g = ad::sigmoid(ad::hadamard(a, c) - 0.5 * c);
        auto l = ad::log(ad::one_minus(pos));
        return contract(h, 10) + contract(g, 11) + contract(ad::transpose(l), 12) +
               ad::square_sum(ad::relu(a)) + ad::mean(ad::clamp(c, -0.9, 0.9));
      },
      {a, b, c, bias, pos});
}

TEST(Autodiff, StructuralOps) {
  nm::Rng rng(2);
  auto x = ad::Var::parameter(random_matrix(rng, 5, 3));
  auto y = ad::Var::parameter(random_matrix(rng, 5, 2));
  auto z = ad::Var::parameter(random_matrix(rng, 2, 3));
  const std::vector<Index> rows{4, 0, 4, 2};
  expect_gradients_match(
      [&] {
        std::vector<ad::Var> cols{x, y};
        std::vector<ad::Var> stacked{x, z};
        auto joined = ad::concat_cols(cols);
        auto tall = ad::concat_rows(stacked);
        return contract(ad::gather_rows(joined, rows), 1) +
               contract(ad::slice_cols(joined, 1, 3), 2) + contract(ad::slice_rows(tall, 3, 4), 3) +
               contract(ad::softmax_rows(joined), 4) +
               contract(ad::row_dot(ad::slice_cols(joined, 0, 2), y), 5);
      },
      {x, y, z});
}

TEST(Autodiff, AcyclicityAbsAndNorm) {
  nm::Rng rng(3);
  auto a = ad::Var::parameter(random_matrix(rng, 4, 4, -0.5, 0.5));
  auto w = ad::Var::parameter(random_matrix(rng, 2, 3));
  expect_gradients_match(
      [&] {
        std::vector<ad::Var> all{a, w};
        return ad::acyclicity(a) + 0.3 * ad::abs_sum(a) + ad::global_l2_norm(all);
      },
      {a, w});
}

TEST(Autodiff, SparseLeftMultiply) {
  nm::Rng rng(4);
  ad::SparseMatrix p(3, 4);
  p.insert(0, 1) = 0.5;
  p.insert(2, 3) = -1.5;
  p.insert(1, 0) = 2.0;
  p.makeCompressed();
  auto x = ad::Var::parameter(random_matrix(rng, 4, 2));
  expect_gradients_match([&] { return contract(ad::sparse_left(p, x), 7); }, {x});
}

TEST(Autodiff, GradientReversalIsExact) {
  nm::Rng rng(5);
  auto x = ad::Var::parameter(random_matrix(rng, 2, 3));
  const Matrix weights = random_matrix(rng, 2, 3);
  auto loss = [&](bool reversed) {
    x.zero_grad();
    auto h = reversed ? ad::grl(x, 1.0) : x;
    EXPECT_EQ(h.value(), x.value());
    ad::backward(ad::sum(ad::hadamard(h, ad::Var::constant(weights))));
    return x.grad();
  };
  const Matrix plain = loss(false);
  const Matrix reversed = loss(true);
  EXPECT_EQ(reversed, -plain);

  x.zero_grad();
  ad::backward(ad::sum(ad::hadamard(ad::grl(ad::grl(x, 1.0), 1.0), ad::Var::constant(weights))));
  EXPECT_EQ(x.grad(), plain);

  x.zero_grad();
  ad::backward(ad::sum(ad::hadamard(ad::grl(x, 0.25), ad::Var::constant(weights))));
  EXPECT_EQ(x.grad(), -0.25 * plain);
}

TEST(Autodiff, ConstantsReceiveNoGradient) {
  auto c = ad::Var::constant(Matrix::Ones(2, 2));
  auto p = ad::Var::parameter(Matrix::Ones(2, 2));
  ad::backward(ad::sum(ad::hadamard(c, p)));
  EXPECT_FALSE(c.has_grad());
  EXPECT_EQ(p.grad(), Matrix::Ones(2, 2));
}

TEST(Adam, MinimisesQuadratic) {
  auto x = ad::Var::parameter(Matrix::Constant(2, 2, 3.0));
  nm::Adam opt({x}, {.learning_rate = 0.05});
  for (int i = 0; i < 2000; ++i) {
    ad::backward(ad::square_sum(x));
    opt.step();
  }
  EXPECT_LT(x.value().cwiseAbs().maxCoeff(), 1e-2);
}
