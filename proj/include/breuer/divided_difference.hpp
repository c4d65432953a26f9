#pragma once

#include <vector>

namespace breuer {

// Divided difference of x -> exp(-x) at the given nodes, i.e. the simplex
// integral of exp(-sum s_j x_j). Opitz: top-right entry of exp of the
// bidiagonal node matrix. Node order is irrelevant.
double exp_divided_difference(std::vector<double> nodes);

}  // namespace breuer
