#pragma once

#include <cstddef>
#include <span>

#include "scatent/grid.hpp"

namespace scatent::detail {

// Derivative along one axis of row-major data: element k of the line is
// v[offset + k * stride]. Sixth-order central differences in the interior,
// dropping to fourth and then second order towards the ends.
inline cplx axis_derivative(std::span<const cplx> v, std::size_t stride, std::size_t idx,
                            std::size_t n, std::size_t offset, double h)
{
    auto at = [&](std::size_t k) { return v[offset + k * stride]; };
    if (idx >= 3 && idx + 3 < n) {
        return (at(idx + 3) - 9.0 * at(idx + 2) + 45.0 * at(idx + 1) - 45.0 * at(idx - 1) + 9.0 * at(idx - 2) -
                at(idx - 3)) /
               (60.0 * h);
    }
    if (idx >= 2 && idx + 2 < n) {
        return (-at(idx + 2) + 8.0 * at(idx + 1) - 8.0 * at(idx - 1) + at(idx - 2)) / (12.0 * h);
    }
    if (idx == 0) {
        return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
    }
    if (idx + 1 == n) {
        return (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h);
    }
    return (at(idx + 1) - at(idx - 1)) / (2.0 * h);
}

}  // namespace scatent::detail
