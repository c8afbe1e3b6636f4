#pragma once

#include <functional>

#include "cicdor/numerics/matrix.hpp"

namespace cicdor::numerics {

struct GradCheckReport {
  double max_rel_error = 0.0;
  Index worst_row = 0;
  Index worst_col = 0;
  double analytic = 0.0;
  double numeric = 0.0;
};

/// Scalar function of a matrix. When `grad` is non-null the function must
/// also write its analytic gradient there.
using DifferentiableFn = std::function<double(const Matrix& x, Matrix* grad)>;

/// Central-difference check of the analytic gradient of `f` at `x`. The
/// relative error per coordinate is |a - n| / max(|a|, |n|, 1e-8).
/// Throws std::domain_error if any evaluation is non-finite.
GradCheckReport grad_check(const DifferentiableFn& f, const Matrix& x, double eps = 1e-5);

/// Relative error of one coordinate, exposed so multi-tensor checks agree.
double relative_error(double analytic, double numeric);

}  // namespace cicdor::numerics
