#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <utility>

#include "scatent/wavepacket.hpp"

namespace scatent {

/// Real 2x2 map T = [[r, s], [t, u]] acting on momentum pairs, z = T p.
/// Only maps with |det T| = 1 (within 1e-12) are representable; these are
/// the relabelings of the momentum plane that preserve normalization.
class LinearMap2 {
public:
    static constexpr double kDetTolerance = 1e-12;

    // Throws InvalidParameter if |ru - st| differs from 1 by more than kDetTolerance.
    LinearMap2(double r, double s, double t, double u);

    static LinearMap2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    // (p1, p2) -> (P, q) = (p1 + p2, mu2 p1 - mu1 p2).
    static LinearMap2 center_of_mass(const Masses& masses);
    // Flip of the second coordinate, (P, q) -> (P, -q).
    static LinearMap2 flip() { return {1.0, 0.0, 0.0, -1.0}; }
    // q -> -q at fixed P, written in particle momenta:
    // [[mu1 - mu2, 2 mu1], [2 mu2, mu2 - mu1]].
    static LinearMap2 reflection(const Masses& masses);

    double r() const noexcept { return m_[0]; }
    double s() const noexcept { return m_[1]; }
    double t() const noexcept { return m_[2]; }
    double u() const noexcept { return m_[3]; }
    double det() const noexcept { return m_[0] * m_[3] - m_[1] * m_[2]; }

    std::pair<double, double> apply(double x1, double x2) const noexcept
    {
        return {m_[0] * x1 + m_[1] * x2, m_[2] * x1 + m_[3] * x2};
    }

    // Largest absolute entry difference.
    double distance(const LinearMap2& other) const noexcept;

private:
    std::array<double, 4> m_;
};

// Matrix product a * b, i.e. b is applied first.
LinearMap2 compose(const LinearMap2& a, const LinearMap2& b);
// Left-to-right matrix product of the list.
LinearMap2 compose(std::initializer_list<LinearMap2> maps);
// Throws NumericError if the inverse drifts from |det| = 1 by more than 1e-9.
LinearMap2 invert(const LinearMap2& map);

/// Interpolation on the tensor grid of a sampled state with a 6 x 6
/// Lagrange stencil (degree 5 per axis), so the error is O(h^6) for smooth,
/// well-resolved amplitudes. Points outside the grid evaluate to zero.
class GridInterpolator {
public:
    static constexpr std::size_t kStencil = 6;

    explicit GridInterpolator(const SampledWavefunction& psi);

    cplx operator()(double x1, double x2) const noexcept;

private:
    Grid1D grid1_;
    Grid1D grid2_;
    std::vector<cplx> f_;
};

struct MapOptions {
    // Relative norm change tolerated before the result counts as not covered.
    double norm_tolerance = 1e-6;
};

// Resamples phi(T^-1 z) onto the target grids with GridInterpolator.
// Throws CoverageError if the norm changes by more than options.norm_tolerance
// (relative), which signals that the mapped support leaves the target grid.
SampledWavefunction apply_map_to_sampled(const SampledWavefunction& psi, const LinearMap2& map,
                                         const Grid1D& target1, const Grid1D& target2,
                                         const MapOptions& options = {});

// Same, with target grids derived from the mapped first and second moments:
// mean_z +- window * std_z on each axis, keeping the source node counts.
SampledWavefunction apply_map_to_sampled(const SampledWavefunction& psi, const LinearMap2& map,
                                         double window = 8.0, const MapOptions& options = {});

// Marginal standard deviations of z = T p for the Gaussian |phi|^2, i.e. the
// square roots of the diagonal of T diag(sigma1^2, sigma2^2) T^T.
std::pair<double, double> mapped_widths(const GaussianProductState& state, const LinearMap2& map);

// Closed-form phi(T^-1 z) sampled on z_i in (T k)_i +- window * width_i.
// No interpolation is involved.
SampledWavefunction sample_gaussian_under_map(const GaussianProductState& state, const LinearMap2& map,
                                              std::size_t n, double window = 8.0);

// Purity of phi(T^-1 z) with respect to the (z1, z2) factorization:
//   sigma1 sigma2 / sqrt((r^2 sigma1^2 + s^2 sigma2^2)(t^2 sigma1^2 + u^2 sigma2^2)).
double gaussian_purity_under_map(const GaussianProductState& state, const LinearMap2& map);

// Purity in the center-of-mass / relative factorization (map = center_of_mass).
double ie_purity(const GaussianProductState& state);

// Interparticle purity of the reflected in-state phi(M p) (map = reflection).
double reflection_purity(const GaussianProductState& state);

// (mu1/sigma1^2 - mu2/sigma2^2) / (mu1/sigma1^2 + mu2/sigma2^2), in [-1, 1];
// zero exactly on the locus m1/sigma1^2 = m2/sigma2^2.
double schulman_residual(const GaussianProductState& state);

}  // namespace scatent
