#pragma once

#include <Eigen/Dense>

namespace cicdor {

// All training mathematics runs in 64-bit floats. Data matrices are laid out
// with one sample per row.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Index = Eigen::Index;

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

}  // namespace cicdor
