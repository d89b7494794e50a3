#include "scatent/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "scatent/errors.hpp"

namespace scatent {

LinearMap2::LinearMap2(double r, double s, double t, double u) : m_{r, s, t, u}
{
    const double d = det();
    if (!std::isfinite(d) || std::abs(std::abs(d) - 1.0) > kDetTolerance) {
        std::ostringstream msg;
        msg << "LinearMap2 requires |det| = 1, got det = " << d;
        throw InvalidParameter(msg.str());
    }
}

LinearMap2 LinearMap2::center_of_mass(const Masses& masses)
{
    // det = -mu1 - mu2; summing the fractions this way keeps it at -1 to rounding.
    const double mu1 = masses.mu1();
    const double mu2 = 1.0 - mu1;
    return {1.0, 1.0, mu2, -mu1};
}

LinearMap2 LinearMap2::reflection(const Masses& masses)
{
    const double mu1 = masses.mu1();
    const double mu2 = 1.0 - mu1;
    return {mu1 - mu2, 2.0 * mu1, 2.0 * mu2, mu2 - mu1};
}

double LinearMap2::distance(const LinearMap2& other) const noexcept
{
    double d = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        d = std::max(d, std::abs(m_[i] - other.m_[i]));
    }
    return d;
}

LinearMap2 compose(const LinearMap2& a, const LinearMap2& b)
{
    return {a.r() * b.r() + a.s() * b.t(), a.r() * b.s() + a.s() * b.u(),
            a.t() * b.r() + a.u() * b.t(), a.t() * b.s() + a.u() * b.u()};
}

LinearMap2 compose(std::initializer_list<LinearMap2> maps)
{
    LinearMap2 acc = LinearMap2::identity();
    for (const auto& m : maps) {
        acc = compose(acc, m);
    }
    return acc;
}

LinearMap2 invert(const LinearMap2& map)
{
    const double d = map.det();
    const double r = map.u() / d;
    const double s = -map.s() / d;
    const double t = -map.t() / d;
    const double u = map.r() / d;
    const double inv_det = r * u - s * t;
    if (std::abs(std::abs(inv_det) - 1.0) > 1e-9) {
        throw NumericError("inverse of LinearMap2 lost |det| = 1 (near-singular input)");
    }
    return {r, s, t, u};
}

// ---------------------------------------------------------------------------
// Tensor-product Lagrange interpolation

GridInterpolator::GridInterpolator(const SampledWavefunction& psi)
    : grid1_(psi.grid1()), grid2_(psi.grid2()), f_(psi.values().begin(), psi.values().end())
{
    if (grid1_.size() < kStencil || grid2_.size() < kStencil) {
        throw InvalidParameter("grid interpolation needs at least 6 nodes per axis");
    }
}

namespace {

// First stencil node and Lagrange weights for fractional grid coordinate g;
// the stencil is shifted inwards near the ends so it never leaves the grid.
std::size_t lagrange_weights(double g, std::size_t n, std::array<double, GridInterpolator::kStencil>& w)
{
    constexpr std::size_t m = GridInterpolator::kStencil;
    const double lo = std::floor(g) - static_cast<double>(m / 2 - 1);
    const std::size_t first = static_cast<std::size_t>(std::clamp(lo, 0.0, static_cast<double>(n - m)));
    const double x = g - static_cast<double>(first);
    for (std::size_t a = 0; a < m; ++a) {
        double num = 1.0;
        double den = 1.0;
        for (std::size_t b = 0; b < m; ++b) {
            if (b == a) continue;
            num *= x - static_cast<double>(b);
            den *= static_cast<double>(a) - static_cast<double>(b);
        }
        w[a] = num / den;
    }
    return first;
}

}  // namespace

cplx GridInterpolator::operator()(double x1, double x2) const noexcept
{
    if (x1 < grid1_.min() || x1 > grid1_.max() || x2 < grid2_.min() || x2 > grid2_.max()) {
        return {};
    }
    const std::size_t n2 = grid2_.size();
    std::array<double, kStencil> w1{};
    std::array<double, kStencil> w2{};
    const std::size_t i0 = lagrange_weights((x1 - grid1_.min()) / grid1_.spacing(), grid1_.size(), w1);
    const std::size_t j0 = lagrange_weights((x2 - grid2_.min()) / grid2_.spacing(), n2, w2);

    cplx acc{};
    for (std::size_t a = 0; a < kStencil; ++a) {
        cplx row{};
        const cplx* line = f_.data() + (i0 + a) * n2 + j0;
        for (std::size_t b = 0; b < kStencil; ++b) {
            row += w2[b] * line[b];
        }
        acc += w1[a] * row;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Mapping sampled states

SampledWavefunction apply_map_to_sampled(const SampledWavefunction& psi, const LinearMap2& map,
                                         const Grid1D& target1, const Grid1D& target2,
                                         const MapOptions& options)
{
    const GridInterpolator interp(psi);
    const LinearMap2 inverse = invert(map);
    auto mapped = sample_function(
        [&](double z1, double z2) {
            const auto [p1, p2] = inverse.apply(z1, z2);
            return interp(p1, p2);
        },
        target1, target2, Basis::transformed);

    const double before = psi.norm();
    const double after = mapped.norm();
    const double change = std::abs(after - before) / before;
    if (!(change <= options.norm_tolerance)) {
        std::ostringstream msg;
        msg << "apply_map_to_sampled: relative norm change " << change << " exceeds "
            << options.norm_tolerance << " (target grid does not cover the mapped support)";
        throw CoverageError(msg.str(), change);
    }
    return mapped;
}

SampledWavefunction apply_map_to_sampled(const SampledWavefunction& psi, const LinearMap2& map,
                                         double window, const MapOptions& options)
{
    const StateStatistics st = state_statistics(psi);
    const auto [c1, c2] = map.apply(st.mean1, st.mean2);
    const double v11 = st.std1 * st.std1;
    const double v22 = st.std2 * st.std2;
    const double z11 = map.r() * map.r() * v11 + 2 * map.r() * map.s() * st.covariance + map.s() * map.s() * v22;
    const double z22 = map.t() * map.t() * v11 + 2 * map.t() * map.u() * st.covariance + map.u() * map.u() * v22;
    return apply_map_to_sampled(psi, map, Grid1D::centered(c1, window * std::sqrt(z11), psi.n1()),
                                Grid1D::centered(c2, window * std::sqrt(z22), psi.n2()), options);
}

std::pair<double, double> mapped_widths(const GaussianProductState& state, const LinearMap2& map)
{
    const double v1 = state.sigma1() * state.sigma1();
    const double v2 = state.sigma2() * state.sigma2();
    return {std::sqrt(map.r() * map.r() * v1 + map.s() * map.s() * v2),
            std::sqrt(map.t() * map.t() * v1 + map.u() * map.u() * v2)};
}

SampledWavefunction sample_gaussian_under_map(const GaussianProductState& state, const LinearMap2& map,
                                              std::size_t n, double window)
{
    const auto [c1, c2] = map.apply(state.k1(), state.k2());
    const auto [w1, w2] = mapped_widths(state, map);
    const LinearMap2 inverse = invert(map);
    return sample_function(
        [&](double z1, double z2) {
            const auto [p1, p2] = inverse.apply(z1, z2);
            return state.momentum_amplitude(p1, p2);
        },
        Grid1D::centered(c1, window * w1, n), Grid1D::centered(c2, window * w2, n), Basis::transformed);
}

// ---------------------------------------------------------------------------
// Closed-form Gaussian purities

double gaussian_purity_under_map(const GaussianProductState& state, const LinearMap2& map)
{
    const auto [w1, w2] = mapped_widths(state, map);
    return state.sigma1() * state.sigma2() / (w1 * w2);
}

double ie_purity(const GaussianProductState& state)
{
    const Masses m = state.masses();
    const double s1 = state.sigma1() * state.sigma1();
    const double s2 = state.sigma2() * state.sigma2();
    const double mu1 = m.mu1();
    const double mu2 = m.mu2();
    return state.sigma1() * state.sigma2() / std::sqrt((s1 + s2) * (mu2 * mu2 * s1 + mu1 * mu1 * s2));
}

double reflection_purity(const GaussianProductState& state)
{
    const Masses m = state.masses();
    const double s1 = state.sigma1() * state.sigma1();
    const double s2 = state.sigma2() * state.sigma2();
    const double mu1 = m.mu1();
    const double mu2 = m.mu2();
    const double d = mu1 - mu2;
    return state.sigma1() * state.sigma2() /
           std::sqrt((d * d * s1 + 4.0 * mu1 * mu1 * s2) * (4.0 * mu2 * mu2 * s1 + d * d * s2));
}

double schulman_residual(const GaussianProductState& state)
{
    const Masses m = state.masses();
    const double a = m.mu1() / (state.sigma1() * state.sigma1());
    const double b = m.mu2() / (state.sigma2() * state.sigma2());
    return (a - b) / (a + b);
}

}  // namespace scatent
