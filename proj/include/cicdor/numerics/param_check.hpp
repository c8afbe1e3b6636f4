#pragma once

#include <functional>
#include <vector>

#include "cicdor/numerics/autodiff.hpp"
#include "cicdor/numerics/grad_check.hpp"

namespace cicdor::numerics {

struct ParamCheckReport {
  GradCheckReport worst;       // coordinates refer to tensor `worst_tensor`
  std::size_t worst_tensor = 0;
  std::size_t coordinates = 0;  // number of entries compared
};

/// Finite-difference check of a graph-built loss against backward() for every
/// entry of every listed parameter. `loss` must rebuild the graph from the
/// current parameter values each time it is called.
ParamCheckReport check_parameters(const std::function<ad::Var()>& loss, std::vector<ad::Var> params,
                                  double eps = 1e-5);

}  // namespace cicdor::numerics
