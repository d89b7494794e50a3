#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "scatent/grid.hpp"

namespace scatent {

// Particle masses and the derived center-of-mass quantities (hbar = 1).
struct Masses {
    double m1 = 1.0;
    double m2 = 1.0;

    double total() const noexcept { return m1 + m2; }
    double mu1() const noexcept { return m1 / (m1 + m2); }
    double mu2() const noexcept { return m2 / (m1 + m2); }
    double reduced() const noexcept { return m1 * m2 / (m1 + m2); }
    // Relative momentum q = mu2 p1 - mu1 p2.
    double relative_momentum(double p1, double p2) const noexcept { return mu2() * p1 - mu1() * p2; }
};

struct GaussianParams {
    double k1 = 0.0;
    double k2 = 0.0;
    double a1 = 0.0;
    double a2 = 0.0;
    double sigma1 = 1.0;
    double sigma2 = 1.0;
    double m1 = 1.0;
    double m2 = 1.0;
};

/// Separable two-particle Gaussian in momentum space,
///
///   phi(p1, p2) = N1 N2 exp(i p1 a1 - (p1-k1)^2 / 4 sigma1^2) exp(i p2 a2 - (p2-k2)^2 / 4 sigma2^2)
///
/// with N_i = (2 pi sigma_i^2)^(-1/4). sigma_i is the momentum standard
/// deviation of particle i and a_i its mean position.
class GaussianProductState {
public:
    // Throws InvalidParameter unless sigma_i > 0 and m_i > 0.
    static GaussianProductState make(const GaussianParams& params);

    // Scattering in-state in the COM frame: k1 = k, k2 = -k, a1 = -a, a2 = a.
    static GaussianProductState scattering(double k, double a, double sigma1, double sigma2,
                                           double m1, double m2);

    const GaussianParams& params() const noexcept { return p_; }
    double k1() const noexcept { return p_.k1; }
    double k2() const noexcept { return p_.k2; }
    double a1() const noexcept { return p_.a1; }
    double a2() const noexcept { return p_.a2; }
    double sigma1() const noexcept { return p_.sigma1; }
    double sigma2() const noexcept { return p_.sigma2; }
    Masses masses() const noexcept { return {p_.m1, p_.m2}; }
    double norm_factor(int particle) const noexcept;

    // Closed-form norm, N1^2 N2^2 * 2 pi sigma1 sigma2; equals 1 up to rounding.
    double analytic_norm() const noexcept;

    cplx momentum_amplitude(double p1, double p2) const noexcept;

    // Position amplitude with psi(x) = (2 pi)^(-1/2) int dp exp(-i p x) phi(p),
    // the convention under which a_i is the mean position of particle i.
    cplx position_amplitude(double x1, double x2) const noexcept;

    bool in_com_frame(double tolerance = 1e-12) const noexcept;

    // Same state after the Galilean boost that brings <P> to zero: p_i -> p_i + m_i v.
    // Leaves the relative momentum distribution unchanged.
    GaussianProductState to_com_frame() const;

    // Probability mass of |phi|^2 outside the rectangle grid1 x grid2.
    double tail_mass(const Grid1D& grid1, const Grid1D& grid2) const;

    // Grid covering k_i +- window * sigma_i.
    Grid1D default_momentum_grid(int particle, std::size_t n, double window = 8.0) const;
    // Grid covering a_i +- window / (2 sigma_i).
    Grid1D default_position_grid(int particle, std::size_t n, double window = 8.0) const;

private:
    explicit GaussianProductState(const GaussianParams& p) : p_(p) {}
    GaussianParams p_;
};

enum class Basis { momentum, position, transformed };

const char* to_string(Basis basis) noexcept;

/// Complex amplitudes on a rectangular grid, stored row-major:
/// value(i, j) lives at index i * grid2.size() + j, where i indexes axis 1.
class SampledWavefunction {
public:
    SampledWavefunction(Grid1D grid1, Grid1D grid2, std::vector<cplx> values, Basis basis);

    const Grid1D& grid1() const noexcept { return grid1_; }
    const Grid1D& grid2() const noexcept { return grid2_; }
    Basis basis() const noexcept { return basis_; }
    std::size_t n1() const noexcept { return grid1_.size(); }
    std::size_t n2() const noexcept { return grid2_.size(); }

    const cplx& operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * n2() + j]; }
    std::span<const cplx> values() const noexcept { return values_; }
    std::span<const cplx> row(std::size_t i) const noexcept { return {values_.data() + i * n2(), n2()}; }

    // Trapezoid estimate of the integral of |phi|^2.
    double norm() const;

    SampledWavefunction scaled(cplx factor) const;
    SampledWavefunction with_grids(Grid1D grid1, Grid1D grid2) const;
    SampledWavefunction with_basis(Basis basis) const;
    // Axis 1 <-> axis 2.
    SampledWavefunction transposed() const;

private:
    Grid1D grid1_;
    Grid1D grid2_;
    std::vector<cplx> values_;
    Basis basis_;
};

// Pointwise sum on identical grids. Throws InvalidParameter on grid mismatch.
SampledWavefunction operator+(const SampledWavefunction& a, const SampledWavefunction& b);

// Trapezoid inner product <a|b> on identical grids.
cplx inner_product(const SampledWavefunction& a, const SampledWavefunction& b);

using Amplitude2 = std::function<cplx(double, double)>;

SampledWavefunction sample_function(const Amplitude2& f, const Grid1D& grid1, const Grid1D& grid2,
                                    Basis basis);

enum class CoveragePolicy { error, warn };

struct SamplingOptions {
    double tail_tolerance = 1e-8;
    CoveragePolicy policy = CoveragePolicy::error;
};

SampledWavefunction sample_on_grid(const GaussianProductState& state, const Grid1D& grid1,
                                   const Grid1D& grid2, const SamplingOptions& options = {});

// Default momentum grids, k_i +- window * sigma_i.
SampledWavefunction sample_on_grid(const GaussianProductState& state, std::size_t n,
                                   double window = 8.0, const SamplingOptions& options = {});

SampledWavefunction sample_position(const GaussianProductState& state, const Grid1D& grid1,
                                    const Grid1D& grid2, const SamplingOptions& options = {});

struct StateStatistics {
    double norm = 0.0;
    double mean1 = 0.0;
    double mean2 = 0.0;
    double std1 = 0.0;
    double std2 = 0.0;
    double covariance = 0.0;
};

// Moments of |phi|^2 / norm. Throws DegenerateStateError if the norm is zero.
StateStatistics state_statistics(const SampledWavefunction& psi);

// Standard deviation of q = mu2 p1 - mu1 p2 for the sampled momentum state.
double relative_momentum_spread(const StateStatistics& stats, const Masses& masses);

// |int dp phi_1(p) phi_2(p)| for the two single-particle factors, in closed form.
double overlap_integral(const GaussianProductState& state);

// Local unitaries on the interparticle factorization.
struct Translate {
    double a;  // multiplies by exp(i a (p1 + p2)) in the momentum basis
};
struct Boost {
    double b;  // shifts both momenta by b
};
struct Fourier {};  // momentum <-> position

using LocalUnitary = std::variant<Translate, Boost, Fourier>;

SampledWavefunction apply_local_unitary(const SampledWavefunction& psi, const LocalUnitary& op);

// Fourier transform onto explicit target grids. Momentum -> position uses the
// kernel exp(-i p x) / sqrt(2 pi), position -> momentum the conjugate kernel.
// Throws InvalidParameter for the transformed basis.
SampledWavefunction fourier(const SampledWavefunction& psi, const Grid1D& target1, const Grid1D& target2);

// Galilean boost p_i -> p_i + m_i v (momentum basis). Exact: only the grids move.
SampledWavefunction galilean_boost(const SampledWavefunction& psi, double velocity, const Masses& masses);

}  // namespace scatent
