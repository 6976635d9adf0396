#pragma once

// Gauss-Hermite rules for integrals against exp(-t^2): Newton iteration on
// the orthonormal recurrence with Christoffel-number weights. Exact for
// polynomials up to degree 2 * order - 1; sum of weights is sqrt(pi).

#include <cstddef>

#include "chanest/linalg.hpp"

namespace chanest {

struct QuadratureRule {
    RealVector nodes;    // ascending, symmetric about 0
    RealVector weights;  // positive
    std::size_t order = 0;
};

// Valid orders: 2..512. Throws std::invalid_argument otherwise.
QuadratureRule gauss_hermite(std::size_t order);

}  // namespace chanest
