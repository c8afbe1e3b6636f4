#pragma once

#include <cstdint>

#include "cicdor/numerics/matrix.hpp"

namespace cicdor::synthetic {

struct LinearScm {
  Matrix rows;   // n x 2k samples, attributes then preferences
  Matrix truth;  // 2k x 2k weighted adjacency, nonzero only attribute -> preference
};

/// Attributes are independent standard normals; each preference takes one
/// or two attribute parents with weights of magnitude in [0.8, 1.6] plus
/// unit Gaussian noise.
LinearScm linear_scm(std::uint64_t seed, Index k = 8, Index n = 5000);

}  // namespace cicdor::synthetic
