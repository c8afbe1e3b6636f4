#include "cicdor/numerics/pca.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace cicdor::numerics {

Matrix Pca::transform(const Matrix& x) const {
  if (x.cols() != mean.size()) throw std::invalid_argument("Pca::transform: width mismatch");
  return (x.rowwise() - mean.transpose()) * components.transpose();
}

Pca pca(const Matrix& x, Index k) {
  const Index n = x.rows();
  const Index d = x.cols();
  if (n < 2) throw std::invalid_argument("pca: need at least two rows");
  if (k < 1 || k > d) throw std::invalid_argument("pca: k must lie in [1, D]");
  if (!x.allFinite()) throw std::invalid_argument("pca: non-finite input");

  Pca out;
  out.mean = x.colwise().mean().transpose();
  const Matrix centered = x.rowwise() - out.mean.transpose();

  Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinV);
  const Vector& sigma = svd.singularValues();
  const Matrix& v = svd.matrixV();

  const double tol = sigma.size() > 0
                         ? std::max(n, d) * std::numeric_limits<double>::epsilon() *
                               std::max(sigma(0), 1e-300)
                         : 0.0;
  Index rank = 0;
  for (Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > tol) ++rank;
  }

  out.components = Matrix::Zero(k, d);
  out.explained_variance = Vector::Zero(k);
  const Index kept = std::min(k, rank);
  for (Index c = 0; c < kept; ++c) {
    Vector axis = v.col(c);
    Index arg = 0;
    axis.cwiseAbs().maxCoeff(&arg);
    if (axis(arg) < 0) axis = -axis;
    out.components.row(c) = axis.transpose();
    out.explained_variance(c) = sigma(c) * sigma(c) / static_cast<double>(n - 1);
  }
  out.rank = kept;
  out.zero_padded = kept < k;
  return out;
}

}  // namespace cicdor::numerics
