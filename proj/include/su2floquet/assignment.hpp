#pragma once

#include "su2floquet/common.hpp"

#include <vector>

namespace su2floquet {

/// Maximum-weight perfect matching on a square weight matrix (Hungarian
/// method with potentials, O(n^3)). Returns col[row].
std::vector<int> max_weight_assignment(const RMatrix& weight);

}  // namespace su2floquet
