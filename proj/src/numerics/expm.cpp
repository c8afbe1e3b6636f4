#include "cicdor/numerics/expm.hpp"

#include <cmath>
#include <stdexcept>

namespace cicdor::numerics {
namespace {

constexpr int kTaylorOrder = 18;
constexpr double kScaledNorm = 0.5;

void require_square_finite(const Matrix& m, const char* who) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument(std::string(who) + ": matrix must be square");
  }
  if (!m.allFinite()) {
    throw std::invalid_argument(std::string(who) + ": matrix has non-finite entries");
  }
}

}  // namespace

Matrix expm(const Matrix& m) {
  require_square_finite(m, "expm");
  const Index d = m.rows();
  if (d == 0) return Matrix(0, 0);

  const double norm1 = m.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > kScaledNorm) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / kScaledNorm)));
  }
  const Matrix x = m / std::ldexp(1.0, squarings);

  // Horner form of sum_{i<=q} x^i / i!.
  const Matrix identity = Matrix::Identity(d, d);
  Matrix acc = identity;
  for (int i = kTaylorOrder; i >= 1; --i) {
    acc = identity + (x * acc) / static_cast<double>(i);
  }
  for (int i = 0; i < squarings; ++i) {
    acc = acc * acc;
  }
  return acc;
}

double expm_trace(const Matrix& m) { return expm(m).trace(); }

double acyclicity(const Matrix& a) {
  require_square_finite(a, "acyclicity");
  return expm_trace(a.cwiseProduct(a)) - static_cast<double>(a.rows());
}

double acyclicity(const Matrix& a, Matrix& grad) {
  require_square_finite(a, "acyclicity");
  const Matrix e = expm(a.cwiseProduct(a));
  grad = e.transpose().cwiseProduct(2.0 * a);
  return e.trace() - static_cast<double>(a.rows());
}

}  // namespace cicdor::numerics
