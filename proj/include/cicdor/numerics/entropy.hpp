#pragma once

#include <span>
#include <vector>

namespace cicdor::numerics {

/// Empirical H(Y | Z) in bits, where `y` is binary and each entry of
/// `columns` is one discrete conditioning variable of the same length as `y`.
/// With no columns this is the marginal entropy H(Y).
double conditional_entropy(std::span<const int> y, const std::vector<std::vector<int>>& columns);

/// Same, restricted to the rows listed in `rows`.
double conditional_entropy(std::span<const int> y, const std::vector<std::vector<int>>& columns,
                           std::span<const std::size_t> rows);

}  // namespace cicdor::numerics
