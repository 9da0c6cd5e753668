#include "qisq/quadrature.hpp"

#include <bit>

namespace qisq {

unsigned QuadratureConfig::max_depth() const
{
    const unsigned leaves = std::max(1u, max_nodes / 31u);
    return static_cast<unsigned>(std::bit_width(leaves)) - 1u;
}

void QuadratureConfig::validate() const
{
    if (!(rel_tol > 0.0) || !(abs_tol >= 0.0)) {
        throw std::invalid_argument("quadrature tolerances must be positive");
    }
    if (max_nodes < 31u) {
        throw std::invalid_argument("quadrature node budget must allow at least one 31-point rule");
    }
}

}  // namespace qisq
