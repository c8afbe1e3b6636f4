#include "cicdor/numerics/param_check.hpp"

#include <cmath>
#include <stdexcept>

namespace cicdor::numerics {

ParamCheckReport check_parameters(const std::function<ad::Var()>& loss, std::vector<ad::Var> params,
                                  double eps) {
  for (auto& p : params) p.zero_grad();
  const ad::Var root = loss();
  if (!std::isfinite(root.item())) throw std::domain_error("check_parameters: loss is not finite");
  ad::backward(root);

  std::vector<Matrix> analytic;
  for (const auto& p : params) analytic.push_back(p.grad());
  for (auto& p : params) p.zero_grad();

  ParamCheckReport report;
  bool first = true;
  for (std::size_t t = 0; t < params.size(); ++t) {
    Matrix& value = params[t].mutable_value();
    for (Index j = 0; j < value.cols(); ++j) {
      for (Index i = 0; i < value.rows(); ++i) {
        const double saved = value(i, j);
        value(i, j) = saved + eps;
        const double plus = loss().item();
        value(i, j) = saved - eps;
        const double minus = loss().item();
        value(i, j) = saved;
        if (!std::isfinite(plus) || !std::isfinite(minus)) {
          throw std::domain_error("check_parameters: loss is not finite near the point");
        }
        const double numeric = (plus - minus) / (2.0 * eps);
        const double err = relative_error(analytic[t](i, j), numeric);
        ++report.coordinates;
        if (first || err > report.worst.max_rel_error) {
          first = false;
          report.worst = {err, i, j, analytic[t](i, j), numeric};
          report.worst_tensor = t;
        }
      }
    }
  }
  return report;
}

}  // namespace cicdor::numerics
