#include "scatent/grid.hpp"

#include <cmath>
#include <string>

#include "scatent/errors.hpp"

namespace scatent {

Grid1D::Grid1D(double min, double max, std::size_t n) : min_(min), max_(max), n_(n)
{
    if (n < 2) {
        throw InvalidParameter("Grid1D needs at least 2 nodes, got " + std::to_string(n));
    }
    if (!(max > min) || !std::isfinite(min) || !std::isfinite(max)) {
        throw InvalidParameter("Grid1D needs finite bounds with max > min");
    }
}

Grid1D Grid1D::centered(double center, double half_width, std::size_t n)
{
    return Grid1D(center - half_width, center + half_width, n);
}

double Grid1D::node(std::size_t i) const noexcept
{
    // Interpolate from both ends so the last node is exactly max.
    const double f = static_cast<double>(i) / static_cast<double>(n_ - 1);
    return min_ * (1.0 - f) + max_ * f;
}

double Grid1D::weight(std::size_t i) const noexcept
{
    const double h = spacing();
    return (i == 0 || i + 1 == n_) ? 0.5 * h : h;
}

std::vector<double> Grid1D::trapezoid_weights() const
{
    std::vector<double> w(n_, spacing());
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
}

}  // namespace scatent
