#include "cicdor/numerics/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cicdor::numerics {

double relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / denom;
}

GradCheckReport grad_check(const DifferentiableFn& f, const Matrix& x, double eps) {
  Matrix analytic = Matrix::Zero(x.rows(), x.cols());
  const double f0 = f(x, &analytic);
  if (!std::isfinite(f0)) throw std::domain_error("grad_check: f(x) is not finite");
  if (analytic.rows() != x.rows() || analytic.cols() != x.cols()) {
    throw std::invalid_argument("grad_check: gradient shape does not match x");
  }

  GradCheckReport report;
  Matrix probe = x;
  for (Index j = 0; j < x.cols(); ++j) {
    for (Index i = 0; i < x.rows(); ++i) {
      const double saved = probe(i, j);
      probe(i, j) = saved + eps;
      const double plus = f(probe, nullptr);
      probe(i, j) = saved - eps;
      const double minus = f(probe, nullptr);
      probe(i, j) = saved;
      if (!std::isfinite(plus) || !std::isfinite(minus)) {
        throw std::domain_error("grad_check: f is not finite near x");
      }
      const double numeric = (plus - minus) / (2.0 * eps);
      const double err = relative_error(analytic(i, j), numeric);
      if (err > report.max_rel_error || (i == 0 && j == 0)) {
        report.max_rel_error = err;
        report.worst_row = i;
        report.worst_col = j;
        report.analytic = analytic(i, j);
        report.numeric = numeric;
      }
    }
  }
  return report;
}

}  // namespace cicdor::numerics
