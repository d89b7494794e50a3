#include "scatent/wavepacket.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>
#include <utility>

#include "finite_difference.hpp"
#include "scatent/errors.hpp"

namespace scatent {

namespace {

constexpr double kPi = std::numbers::pi;

// Mass of a normal(center, std) distribution outside [lo, hi].
double gaussian_tail(double center, double std, double lo, double hi)
{
    const double below = 0.5 * std::erfc((center - lo) / (std * std::numbers::sqrt2));
    const double above = 0.5 * std::erfc((hi - center) / (std * std::numbers::sqrt2));
    return below + above;
}

double rectangle_tail(double t1, double t2) { return t1 + t2 - t1 * t2; }

void check_coverage(double tail, const SamplingOptions& options, const char* what)
{
    if (tail <= options.tail_tolerance) {
        return;
    }
    std::ostringstream msg;
    msg << what << ": tail mass " << tail << " outside grid exceeds " << options.tail_tolerance;
    if (options.policy == CoveragePolicy::error) {
        throw CoverageError(msg.str(), tail);
    }
    std::clog << "warning: " << msg.str() << '\n';
}

// Expectation of the conjugate coordinate along each axis. With the library's
// transform convention x acts as -i d/dp on momentum amplitudes and p as
// +i d/dx on position amplitudes.
std::pair<double, double> conjugate_means(const SampledWavefunction& psi)
{
    const double sign = psi.basis() == Basis::position ? 1.0 : -1.0;
    const auto v = psi.values();
    const std::size_t n1 = psi.n1();
    const std::size_t n2 = psi.n2();
    const double h1 = psi.grid1().spacing();
    const double h2 = psi.grid2().spacing();
    CompensatedSum<double> s1;
    CompensatedSum<double> s2;
    CompensatedSum<double> norm;
    for (std::size_t i = 0; i < n1; ++i) {
        for (std::size_t j = 0; j < n2; ++j) {
            const double w = psi.grid1().weight(i) * psi.grid2().weight(j);
            const cplx f = psi(i, j);
            if (f == cplx{}) {
                continue;
            }
            const cplx d1 = detail::axis_derivative(v, n2, i, n1, j, h1);
            const cplx d2 = detail::axis_derivative(v, 1, j, n2, i * n2, h2);
            s1.add(w * (std::conj(f) * cplx(0.0, sign) * d1).real());
            s2.add(w * (std::conj(f) * cplx(0.0, sign) * d2).real());
            norm.add(w * std::norm(f));
        }
    }
    const double nrm = norm.value();
    if (!(nrm > 0.0)) {
        throw DegenerateStateError("cannot Fourier transform a zero state");
    }
    return {s1.value() / nrm, s2.value() / nrm};
}

// Kernel matrix K[j][i] = w_i exp(sign i src_i dst_j) / sqrt(2 pi).
std::vector<cplx> fourier_kernel(const Grid1D& src, const Grid1D& dst, double sign)
{
    const std::size_t ns = src.size();
    const std::size_t nd = dst.size();
    std::vector<cplx> k(nd * ns);
    const double scale = 1.0 / std::sqrt(2.0 * kPi);
    for (std::size_t j = 0; j < nd; ++j) {
        const double x = dst.node(j);
        for (std::size_t i = 0; i < ns; ++i) {
            k[j * ns + i] = std::polar(scale * src.weight(i), sign * src.node(i) * x);
        }
    }
    return k;
}

}  // namespace

// ---------------------------------------------------------------------------
// GaussianProductState

GaussianProductState GaussianProductState::make(const GaussianParams& params)
{
    if (!(params.sigma1 > 0.0) || !(params.sigma2 > 0.0)) {
        throw InvalidParameter("momentum widths sigma1, sigma2 must be positive");
    }
    if (!(params.m1 > 0.0) || !(params.m2 > 0.0)) {
        throw InvalidParameter("masses m1, m2 must be positive");
    }
    for (double v : {params.k1, params.k2, params.a1, params.a2, params.sigma1, params.sigma2,
                     params.m1, params.m2}) {
        if (!std::isfinite(v)) {
            throw InvalidParameter("Gaussian parameters must be finite");
        }
    }
    return GaussianProductState(params);
}

GaussianProductState GaussianProductState::scattering(double k, double a, double sigma1,
                                                      double sigma2, double m1, double m2)
{
    return make({k, -k, -a, a, sigma1, sigma2, m1, m2});
}

double GaussianProductState::norm_factor(int particle) const noexcept
{
    const double s = particle == 1 ? p_.sigma1 : p_.sigma2;
    return std::pow(2.0 * kPi * s * s, -0.25);
}

double GaussianProductState::analytic_norm() const noexcept
{
    const double n1 = norm_factor(1);
    const double n2 = norm_factor(2);
    // int exp(-(p-k)^2 / 2 sigma^2) dp = sqrt(2 pi) sigma
    return n1 * n1 * std::sqrt(2.0 * kPi) * p_.sigma1 * n2 * n2 * std::sqrt(2.0 * kPi) * p_.sigma2;
}

cplx GaussianProductState::momentum_amplitude(double p1, double p2) const noexcept
{
    const double d1 = p1 - p_.k1;
    const double d2 = p2 - p_.k2;
    const double mag = norm_factor(1) * norm_factor(2) *
                       std::exp(-d1 * d1 / (4.0 * p_.sigma1 * p_.sigma1) -
                                d2 * d2 / (4.0 * p_.sigma2 * p_.sigma2));
    return std::polar(mag, p1 * p_.a1 + p2 * p_.a2);
}

cplx GaussianProductState::position_amplitude(double x1, double x2) const noexcept
{
    // (2 pi)^(-1/2) N sqrt(4 pi sigma^2) exp(i k (a - x)) exp(-sigma^2 (x - a)^2) per particle
    auto factor = [](double x, double k, double a, double s, double n) {
        const double d = x - a;
        return std::polar(n * std::sqrt(2.0) * s * std::exp(-s * s * d * d), k * (a - x));
    };
    return factor(x1, p_.k1, p_.a1, p_.sigma1, norm_factor(1)) *
           factor(x2, p_.k2, p_.a2, p_.sigma2, norm_factor(2));
}

bool GaussianProductState::in_com_frame(double tolerance) const noexcept
{
    const double scale = std::max({std::abs(p_.k1), std::abs(p_.k2), p_.sigma1, p_.sigma2});
    return std::abs(p_.k1 + p_.k2) <= tolerance * scale;
}

GaussianProductState GaussianProductState::to_com_frame() const
{
    // k_i + m_i v with v = -(k1 + k2) / M gives k1 = -k2 = mu2 k1 - mu1 k2;
    // written in that form so the total momentum cancels exactly.
    GaussianParams boosted = p_;
    const double q = masses().relative_momentum(p_.k1, p_.k2);
    boosted.k1 = q;
    boosted.k2 = -q;
    return GaussianProductState(boosted);
}

double GaussianProductState::tail_mass(const Grid1D& grid1, const Grid1D& grid2) const
{
    return rectangle_tail(gaussian_tail(p_.k1, p_.sigma1, grid1.min(), grid1.max()),
                          gaussian_tail(p_.k2, p_.sigma2, grid2.min(), grid2.max()));
}

Grid1D GaussianProductState::default_momentum_grid(int particle, std::size_t n, double window) const
{
    return particle == 1 ? Grid1D::centered(p_.k1, window * p_.sigma1, n)
                         : Grid1D::centered(p_.k2, window * p_.sigma2, n);
}

Grid1D GaussianProductState::default_position_grid(int particle, std::size_t n, double window) const
{
    return particle == 1 ? Grid1D::centered(p_.a1, window / (2.0 * p_.sigma1), n)
                         : Grid1D::centered(p_.a2, window / (2.0 * p_.sigma2), n);
}

// ---------------------------------------------------------------------------
// SampledWavefunction

const char* to_string(Basis basis) noexcept
{
    switch (basis) {
    case Basis::momentum: return "momentum";
    case Basis::position: return "position";
    case Basis::transformed: return "transformed";
    }
    return "unknown";
}

SampledWavefunction::SampledWavefunction(Grid1D grid1, Grid1D grid2, std::vector<cplx> values,
                                         Basis basis)
    : grid1_(std::move(grid1)), grid2_(std::move(grid2)), values_(std::move(values)), basis_(basis)
{
    if (values_.size() != grid1_.size() * grid2_.size()) {
        throw InvalidParameter("value array size does not match grid shape");
    }
}

double SampledWavefunction::norm() const
{
    CompensatedSum<double> acc;
    for (std::size_t i = 0; i < n1(); ++i) {
        CompensatedSum<double> row_acc;
        for (std::size_t j = 0; j < n2(); ++j) {
            row_acc.add(grid2_.weight(j) * std::norm((*this)(i, j)));
        }
        acc.add(grid1_.weight(i) * row_acc.value());
    }
    return acc.value();
}

SampledWavefunction SampledWavefunction::scaled(cplx factor) const
{
    std::vector<cplx> v(values_);
    for (auto& x : v) {
        x *= factor;
    }
    return {grid1_, grid2_, std::move(v), basis_};
}

SampledWavefunction SampledWavefunction::with_grids(Grid1D grid1, Grid1D grid2) const
{
    return {std::move(grid1), std::move(grid2), values_, basis_};
}

SampledWavefunction SampledWavefunction::with_basis(Basis basis) const
{
    return {grid1_, grid2_, values_, basis};
}

SampledWavefunction SampledWavefunction::transposed() const
{
    std::vector<cplx> v(values_.size());
    for (std::size_t i = 0; i < n1(); ++i) {
        for (std::size_t j = 0; j < n2(); ++j) {
            v[j * n1() + i] = (*this)(i, j);
        }
    }
    return {grid2_, grid1_, std::move(v), basis_};
}

SampledWavefunction operator+(const SampledWavefunction& a, const SampledWavefunction& b)
{
    if (!(a.grid1() == b.grid1()) || !(a.grid2() == b.grid2())) {
        throw InvalidParameter("cannot add wavefunctions sampled on different grids");
    }
    std::vector<cplx> v(a.values().begin(), a.values().end());
    const auto bv = b.values();
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] += bv[i];
    }
    return {a.grid1(), a.grid2(), std::move(v), a.basis()};
}

cplx inner_product(const SampledWavefunction& a, const SampledWavefunction& b)
{
    if (!(a.grid1() == b.grid1()) || !(a.grid2() == b.grid2())) {
        throw InvalidParameter("inner product needs identical grids");
    }
    CompensatedSum<cplx> acc;
    for (std::size_t i = 0; i < a.n1(); ++i) {
        CompensatedSum<cplx> row_acc;
        for (std::size_t j = 0; j < a.n2(); ++j) {
            row_acc.add(a.grid2().weight(j) * std::conj(a(i, j)) * b(i, j));
        }
        acc.add(a.grid1().weight(i) * row_acc.value());
    }
    return acc.value();
}

SampledWavefunction sample_function(const Amplitude2& f, const Grid1D& grid1, const Grid1D& grid2,
                                    Basis basis)
{
    std::vector<cplx> v(grid1.size() * grid2.size());
    for (std::size_t i = 0; i < grid1.size(); ++i) {
        const double x1 = grid1.node(i);
        for (std::size_t j = 0; j < grid2.size(); ++j) {
            v[i * grid2.size() + j] = f(x1, grid2.node(j));
        }
    }
    return {grid1, grid2, std::move(v), basis};
}

SampledWavefunction sample_on_grid(const GaussianProductState& state, const Grid1D& grid1,
                                   const Grid1D& grid2, const SamplingOptions& options)
{
    check_coverage(state.tail_mass(grid1, grid2), options, "sample_on_grid");
    return sample_function([&](double p1, double p2) { return state.momentum_amplitude(p1, p2); },
                           grid1, grid2, Basis::momentum);
}

SampledWavefunction sample_on_grid(const GaussianProductState& state, std::size_t n, double window,
                                   const SamplingOptions& options)
{
    return sample_on_grid(state, state.default_momentum_grid(1, n, window),
                          state.default_momentum_grid(2, n, window), options);
}

SampledWavefunction sample_position(const GaussianProductState& state, const Grid1D& grid1,
                                    const Grid1D& grid2, const SamplingOptions& options)
{
    const double t1 = gaussian_tail(state.a1(), 0.5 / state.sigma1(), grid1.min(), grid1.max());
    const double t2 = gaussian_tail(state.a2(), 0.5 / state.sigma2(), grid2.min(), grid2.max());
    check_coverage(rectangle_tail(t1, t2), options, "sample_position");
    return sample_function([&](double x1, double x2) { return state.position_amplitude(x1, x2); },
                           grid1, grid2, Basis::position);
}

StateStatistics state_statistics(const SampledWavefunction& psi)
{
    CompensatedSum<double> n;
    CompensatedSum<double> s1;
    CompensatedSum<double> s2;
    for (std::size_t i = 0; i < psi.n1(); ++i) {
        const double x1 = psi.grid1().node(i);
        const double w1 = psi.grid1().weight(i);
        for (std::size_t j = 0; j < psi.n2(); ++j) {
            const double d = w1 * psi.grid2().weight(j) * std::norm(psi(i, j));
            n.add(d);
            s1.add(d * x1);
            s2.add(d * psi.grid2().node(j));
        }
    }
    StateStatistics st;
    st.norm = n.value();
    if (!(st.norm > 0.0) || !std::isfinite(st.norm)) {
        throw DegenerateStateError("state has zero (or non-finite) norm");
    }
    st.mean1 = s1.value() / st.norm;
    st.mean2 = s2.value() / st.norm;

    // Central moments in a second pass for accuracy.
    CompensatedSum<double> v1;
    CompensatedSum<double> v2;
    CompensatedSum<double> c12;
    for (std::size_t i = 0; i < psi.n1(); ++i) {
        const double d1 = psi.grid1().node(i) - st.mean1;
        const double w1 = psi.grid1().weight(i);
        for (std::size_t j = 0; j < psi.n2(); ++j) {
            const double d2 = psi.grid2().node(j) - st.mean2;
            const double d = w1 * psi.grid2().weight(j) * std::norm(psi(i, j));
            v1.add(d * d1 * d1);
            v2.add(d * d2 * d2);
            c12.add(d * d1 * d2);
        }
    }
    st.std1 = std::sqrt(v1.value() / st.norm);
    st.std2 = std::sqrt(v2.value() / st.norm);
    st.covariance = c12.value() / st.norm;
    return st;
}

double relative_momentum_spread(const StateStatistics& stats, const Masses& masses)
{
    const double a = masses.mu2() * stats.std1;
    const double b = masses.mu1() * stats.std2;
    const double var = a * a + b * b - 2.0 * masses.mu1() * masses.mu2() * stats.covariance;
    return std::sqrt(std::max(var, 0.0));
}

double overlap_integral(const GaussianProductState& state)
{
    // phi_1(p) phi_2(p) = N1 N2 exp(-A p^2 + B p - C), B complex.
    const double s1 = state.sigma1();
    const double s2 = state.sigma2();
    const double A = 1.0 / (4.0 * s1 * s1) + 1.0 / (4.0 * s2 * s2);
    const double b_re = state.k1() / (2.0 * s1 * s1) + state.k2() / (2.0 * s2 * s2);
    const double b_im = state.a1() + state.a2();
    const double C = state.k1() * state.k1() / (4.0 * s1 * s1) + state.k2() * state.k2() / (4.0 * s2 * s2);
    const double exponent = (b_re * b_re - b_im * b_im) / (4.0 * A) - C;
    return state.norm_factor(1) * state.norm_factor(2) * std::sqrt(kPi / A) * std::exp(exponent);
}

// ---------------------------------------------------------------------------
// Local unitaries

SampledWavefunction fourier(const SampledWavefunction& psi, const Grid1D& target1, const Grid1D& target2)
{
    if (psi.basis() == Basis::transformed) {
        throw InvalidParameter("Fourier transform is defined for momentum or position bases only");
    }
    const bool to_position = psi.basis() == Basis::momentum;
    const double sign = to_position ? -1.0 : 1.0;
    const auto k2 = fourier_kernel(psi.grid2(), target2, sign);
    const auto k1 = fourier_kernel(psi.grid1(), target1, sign);
    const std::size_t n1 = psi.n1();
    const std::size_t n2 = psi.n2();
    const std::size_t m1 = target1.size();
    const std::size_t m2 = target2.size();

    // Axis 2 first: tmp(i, l) = sum_j K2[l][j] psi(i, j).
    std::vector<cplx> tmp(n1 * m2);
    for (std::size_t i = 0; i < n1; ++i) {
        const auto row = psi.row(i);
        for (std::size_t l = 0; l < m2; ++l) {
            const cplx* kr = &k2[l * n2];
            cplx acc{};
            for (std::size_t j = 0; j < n2; ++j) {
                acc += kr[j] * row[j];
            }
            tmp[i * m2 + l] = acc;
        }
    }
    // Axis 1: out(r, l) = sum_i K1[r][i] tmp(i, l).
    std::vector<cplx> out(m1 * m2, cplx{});
    for (std::size_t r = 0; r < m1; ++r) {
        const cplx* kr = &k1[r * n1];
        cplx* dst = &out[r * m2];
        for (std::size_t i = 0; i < n1; ++i) {
            const cplx c = kr[i];
            const cplx* src = &tmp[i * m2];
            for (std::size_t l = 0; l < m2; ++l) {
                dst[l] += c * src[l];
            }
        }
    }
    return {target1, target2, std::move(out), to_position ? Basis::position : Basis::momentum};
}

SampledWavefunction galilean_boost(const SampledWavefunction& psi, double velocity, const Masses& masses)
{
    if (psi.basis() == Basis::position) {
        throw InvalidParameter("galilean_boost expects a momentum-basis state");
    }
    return psi.with_grids(psi.grid1().shifted(masses.m1 * velocity),
                          psi.grid2().shifted(masses.m2 * velocity));
}

namespace {

// exp(i c (u1 + u2)) on the grid nodes.
SampledWavefunction multiply_linear_phase(const SampledWavefunction& psi, double c)
{
    std::vector<cplx> v(psi.values().begin(), psi.values().end());
    for (std::size_t i = 0; i < psi.n1(); ++i) {
        const double u1 = psi.grid1().node(i);
        for (std::size_t j = 0; j < psi.n2(); ++j) {
            v[i * psi.n2() + j] *= std::polar(1.0, c * (u1 + psi.grid2().node(j)));
        }
    }
    return {psi.grid1(), psi.grid2(), std::move(v), psi.basis()};
}

}  // namespace

SampledWavefunction apply_local_unitary(const SampledWavefunction& psi, const LocalUnitary& op)
{
    // Momentum-like bases: translation is a phase, a boost moves the grid.
    // Position basis: the roles swap; exp(-i b x) realizes p -> p + b.
    const bool position = psi.basis() == Basis::position;
    if (const auto* t = std::get_if<Translate>(&op)) {
        if (position) {
            return psi.with_grids(psi.grid1().shifted(t->a), psi.grid2().shifted(t->a));
        }
        return multiply_linear_phase(psi, t->a);
    }
    if (const auto* b = std::get_if<Boost>(&op)) {
        if (position) {
            return multiply_linear_phase(psi, -b->b);
        }
        return psi.with_grids(psi.grid1().shifted(b->b), psi.grid2().shifted(b->b));
    }
    // Fourier onto the reciprocal grid centered on the conjugate mean: n nodes
    // with spacing 2 pi / (n h), which makes the discrete pair exactly invertible.
    const auto [c1, c2] = conjugate_means(psi);
    auto reciprocal = [](const Grid1D& g, double center) {
        const double n = static_cast<double>(g.size());
        const double spacing = 2.0 * kPi / (n * g.spacing());
        return Grid1D::centered(center, 0.5 * spacing * (n - 1.0), g.size());
    };
    return fourier(psi, reciprocal(psi.grid1(), c1), reciprocal(psi.grid2(), c2));
}

}  // namespace scatent
