#pragma once

#include "cicdor/numerics/matrix.hpp"

namespace cicdor::numerics {

/// Matrix exponential by scaling and squaring with a truncated Taylor series.
/// The scaled matrix has 1-norm at most 1/2 and the series is cut at order 18,
/// which keeps the truncation bound below 1e-20 before squaring.
Matrix expm(const Matrix& m);

/// Tr(e^M). Throws std::invalid_argument for non-square or non-finite input.
double expm_trace(const Matrix& m);

/// h(A) = Tr(e^{A∘A}) - d. Zero iff the graph of nonzero entries is acyclic.
double acyclicity(const Matrix& a);

/// Same as above; also writes dh/dA = (e^{A∘A})ᵀ ∘ 2A into `grad`.
double acyclicity(const Matrix& a, Matrix& grad);

}  // namespace cicdor::numerics
