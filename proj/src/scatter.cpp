#include "scatent/scatter.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>
#include <utility>

#include "scatent/errors.hpp"

namespace scatent {

namespace {

// Amplitudes at the incoming relative momentum. Nodes with q <= 0 carry no
// in-state mass (checked by the caller); they get the amplitude at |q|.
AmplitudePair amplitudes_at(const PotentialModel& model, double q, double reduced_mass, double floor)
{
    return amplitudes(model, std::max(std::abs(q), floor), reduced_mass);
}

// Closed-form out-state amplitude phi_tra(p) + phi_ref(p) for a COM-frame Gaussian.
struct OutAmplitude {
    const GaussianProductState& in;
    const PotentialModel& model;
    LinearMap2 reflection;
    Masses masses;
    double q_floor;

    cplx transmitted(double p1, double p2) const
    {
        const double q = masses.relative_momentum(p1, p2);
        return amplitudes_at(model, q, masses.reduced(), q_floor).t * in.momentum_amplitude(p1, p2);
    }

    cplx reflected(double p1, double p2) const
    {
        const auto [b1, b2] = reflection.apply(p1, p2);
        const double q_in = masses.relative_momentum(b1, b2);
        return amplitudes_at(model, q_in, masses.reduced(), q_floor).r * in.momentum_amplitude(b1, b2);
    }
};

double relative_width(const GaussianProductState& s)
{
    const Masses m = s.masses();
    const double a = m.mu2() * s.sigma1();
    const double b = m.mu1() * s.sigma2();
    return std::sqrt(a * a + b * b);
}

void check_modes_cover(const OutState& out, const ScatterOptions& options)
{
    const double total = out.transmission + out.reflection;
    if (!(std::abs(total - 1.0) <= options.norm_tolerance)) {
        std::ostringstream msg;
        msg << "out-state norm T + R = " << total << " misses 1 by more than " << options.norm_tolerance
            << "; the out grid does not cover both lobes";
        if (options.coverage == CoveragePolicy::warn) {
            std::clog << "warning: " << msg.str() << '\n';
            return;
        }
        throw CoverageError(msg.str(), std::abs(total - 1.0));
    }
}

void finish(OutState& out)
{
    out.transmission = out.phi_tra.norm();
    out.reflection = out.phi_ref.norm();
    if (out.transmission > 0.0 && out.reflection > 0.0) {
        out.mode_overlap = std::abs(inner_product(out.phi_tra, out.phi_ref)) /
                           std::sqrt(out.transmission * out.reflection);
    } else {
        out.mode_overlap = 0.0;
    }
}

}  // namespace

BoundaryReport check_boundary_conditions(const GaussianProductState& in, const ScatterOptions& options)
{
    const GaussianProductState s = in.in_com_frame() ? in : in.to_com_frame();
    BoundaryReport report;
    report.k = s.k1();
    report.overlap = overlap_integral(s);
    // q12 is normal with mean k and width relative_width for a product Gaussian.
    report.negative_q_mass = 0.5 * std::erfc(report.k / (relative_width(s) * std::numbers::sqrt2));
    report.approaching = report.k > 0.0;
    report.overlap_ok = report.overlap < options.overlap_tolerance;
    report.negative_q_ok = report.negative_q_mass <= options.negative_q_tolerance;
    return report;
}

OutState out_state(const GaussianProductState& in_state, const PotentialModel& model, const ScatterOptions& options)
{
    validate(model);
    const BoundaryReport bc = check_boundary_conditions(in_state, options);
    if (!bc.ok()) {
        std::ostringstream msg;
        msg << "in-state violates the scattering boundary conditions: k = " << bc.k
            << ", overlap = " << bc.overlap << ", mass at q <= 0 = " << bc.negative_q_mass;
        throw BoundaryConditionError(msg.str());
    }
    const GaussianProductState in = in_state.in_com_frame() ? in_state : in_state.to_com_frame();
    const Masses masses = in.masses();
    const LinearMap2 reflection = LinearMap2::reflection(masses);
    const auto [wr1, wr2] = mapped_widths(in, reflection);
    const double width = std::max({in.sigma1(), in.sigma2(), wr1, wr2});
    const Grid1D grid = Grid1D::centered(0.0, bc.k + options.window * width, options.n);

    const OutAmplitude amp{in, model, reflection, masses, 1e-12 * bc.k};
    OutState out{
        sample_function([&](double p1, double p2) { return amp.transmitted(p1, p2); }, grid, grid, Basis::momentum),
        sample_function([&](double p1, double p2) { return amp.reflected(p1, p2); }, grid, grid, Basis::momentum),
        0.0, 0.0, 0.0, bc.k, masses,
    };
    finish(out);
    check_modes_cover(out, options);
    return out;
}

OutState out_state(const SampledWavefunction& in_state, const Masses& masses, const PotentialModel& model,
                   const ScatterOptions& options)
{
    validate(model);
    if (in_state.basis() != Basis::momentum) {
        throw InvalidParameter("out_state expects a momentum-basis in-state");
    }
    StateStatistics st = state_statistics(in_state);
    if (std::abs(st.norm - 1.0) > 1e-6) {
        throw NormalizationError("in-state is not normalized", st.norm);
    }
    SampledWavefunction in = in_state;
    const double total_p = st.mean1 + st.mean2;
    const double scale = std::max({std::abs(st.mean1), std::abs(st.mean2), st.std1, st.std2});
    if (std::abs(total_p) > 1e-9 * scale) {
        in = galilean_boost(in, -total_p / masses.total(), masses);
        st = state_statistics(in);
    }
    const double k = masses.relative_momentum(st.mean1, st.mean2);
    if (!(k > 0.0)) {
        throw BoundaryConditionError("in-state particles are not approaching (mean relative momentum <= 0)");
    }

    CompensatedSum<double> negative;
    for (std::size_t i = 0; i < in.n1(); ++i) {
        for (std::size_t j = 0; j < in.n2(); ++j) {
            if (masses.relative_momentum(in.grid1().node(i), in.grid2().node(j)) <= 0.0) {
                negative.add(in.grid1().weight(i) * in.grid2().weight(j) * std::norm(in(i, j)));
            }
        }
    }
    if (negative.value() / st.norm > options.negative_q_tolerance) {
        std::ostringstream msg;
        msg << "in-state has mass " << negative.value() / st.norm << " at q12 <= 0";
        throw BoundaryConditionError(msg.str());
    }

    const LinearMap2 reflection = LinearMap2::reflection(masses);
    const double v1 = st.std1 * st.std1;
    const double v2 = st.std2 * st.std2;
    const double c = st.covariance;
    auto mapped_std = [&](double a, double b) { return std::sqrt(std::max(a * a * v1 + 2 * a * b * c + b * b * v2, 0.0)); };
    const double width = std::max({st.std1, st.std2, mapped_std(reflection.r(), reflection.s()),
                                   mapped_std(reflection.t(), reflection.u())});
    const double center = std::max(std::abs(st.mean1), std::abs(st.mean2));
    const Grid1D grid = Grid1D::centered(0.0, center + options.window * width, options.n);

    const GridInterpolator interp(in);
    const double mred = masses.reduced();
    const double floor = 1e-12 * k;
    OutState out{
        sample_function(
            [&](double p1, double p2) {
                const double q = masses.relative_momentum(p1, p2);
                return amplitudes_at(model, q, mred, floor).t * interp(p1, p2);
            },
            grid, grid, Basis::momentum),
        sample_function(
            [&](double p1, double p2) {
                const auto [b1, b2] = reflection.apply(p1, p2);
                const double q_in = masses.relative_momentum(b1, b2);
                return amplitudes_at(model, q_in, mred, floor).r * interp(b1, b2);
            },
            grid, grid, Basis::momentum),
        0.0, 0.0, 0.0, k, masses,
    };
    finish(out);
    check_modes_cover(out, options);
    return out;
}

SplitPurity split_purity(const OutState& out, const ScatterOptions& options)
{
    if (!(out.mode_overlap < options.orthogonality_tolerance)) {
        std::ostringstream msg;
        msg << "transmitted and reflected modes overlap: " << out.mode_overlap;
        throw ModeOverlapError(msg.str(), out.mode_overlap);
    }
    PurityOptions mode_options;
    mode_options.require_normalized = false;
    mode_options.threads = options.threads;
    PurityOptions total_options;
    total_options.threads = options.threads;

    SplitPurity s;
    s.p_tra = purity_numeric(out.phi_tra, mode_options).purity;
    s.p_ref = purity_numeric(out.phi_ref, mode_options).purity;
    s.p_total = purity_numeric(out.total(), total_options).purity;
    return s;
}

namespace {

// Probabilities measured on a grid may miss [0, 1] by rounding; the same
// slack as the T + R check is accepted and clamped away.
std::pair<double, double> checked_probabilities(double transmission, double reflection)
{
    constexpr double slack = 1e-8;
    const auto in_range = [](double p) { return p >= -slack && p <= 1.0 + slack; };
    if (!(in_range(transmission) && in_range(reflection))) {
        throw InvalidParameter("T and R must lie in [0, 1]");
    }
    if (std::abs(transmission + reflection - 1.0) > slack) {
        throw InvalidParameter("T + R must equal 1");
    }
    return {std::clamp(transmission, 0.0, 1.0), std::clamp(reflection, 0.0, 1.0)};
}

}  // namespace

double constant_amplitude_purity(const GaussianProductState& in, double transmission, double reflection)
{
    const auto [t, r] = checked_probabilities(transmission, reflection);
    return t * t + r * r * reflection_purity(in);
}

double qubit_model_purity(double transmission, double reflection)
{
    const auto [t, r] = checked_probabilities(transmission, reflection);
    return t * t + r * r;
}

double VariationDiagnostic::value() const noexcept
{
    double v = 0.0;
    if (t_defined) {
        v = std::max(v, t_variation);
    }
    if (r_defined) {
        v = std::max(v, r_variation);
    }
    return v;
}

VariationDiagnostic amplitude_variation_diagnostic(const PotentialModel& model, const GaussianProductState& in_state,
                                                   const ScatterOptions& options)
{
    validate(model);
    const GaussianProductState in = in_state.in_com_frame() ? in_state : in_state.to_com_frame();
    const Masses masses = in.masses();
    SamplingOptions sampling;
    sampling.policy = options.coverage;
    const StateStatistics st = state_statistics(sample_on_grid(in, options.n, options.window, sampling));

    VariationDiagnostic d;
    d.k = in.k1();
    d.delta_q = relative_momentum_spread(st, masses);
    if (!(d.k > 0.0)) {
        throw BoundaryConditionError("variation diagnostic needs approaching particles (k > 0)");
    }
    const double h = 1e-4 * std::min(d.delta_q, d.k);
    const std::array<double, 3> q{d.k - h, d.k, d.k + h};
    const AmplitudeTable table = tabulate_amplitudes(model, q, masses.reduced());
    const double tk = std::abs(table.t[1]);
    const double rk = std::abs(table.r[1]);
    // A ratio against a (numerically) vanishing amplitude says nothing about
    // the approximation, since that channel carries no probability.
    constexpr double negligible = 1e-6;
    d.t_defined = tk > negligible;
    d.r_defined = rk > negligible;
    if (d.t_defined) {
        d.t_variation = d.delta_q * std::abs(table.dt[1]) / tk;
    }
    if (d.r_defined) {
        d.r_variation = d.delta_q * std::abs(table.dr[1]) / rk;
    }
    return d;
}

IeInvariance ie_purity_invariance_check(const GaussianProductState& in_state, const PotentialModel& model,
                                        const ScatterOptions& options)
{
    validate(model);
    const BoundaryReport bc = check_boundary_conditions(in_state, options);
    if (!bc.ok()) {
        throw BoundaryConditionError("in-state violates the scattering boundary conditions");
    }
    const GaussianProductState in = in_state.in_com_frame() ? in_state : in_state.to_com_frame();
    const Masses masses = in.masses();
    const LinearMap2 to_ie = LinearMap2::center_of_mass(masses);
    const LinearMap2 from_ie = invert(to_ie);
    const LinearMap2 reflection = LinearMap2::reflection(masses);

    const double sigma_total = std::hypot(in.sigma1(), in.sigma2());
    const Grid1D p_grid = Grid1D::centered(0.0, options.window * sigma_total, options.n);
    const Grid1D q_grid = Grid1D::centered(0.0, bc.k + options.window * relative_width(in), options.n);

    const OutAmplitude amp{in, model, reflection, masses, 1e-12 * bc.k};
    const auto before = sample_function(
        [&](double p, double q) {
            const auto [p1, p2] = from_ie.apply(p, q);
            return in.momentum_amplitude(p1, p2);
        },
        p_grid, q_grid, Basis::transformed);
    const auto after = sample_function(
        [&](double p, double q) {
            const auto [p1, p2] = from_ie.apply(p, q);
            return amp.transmitted(p1, p2) + amp.reflected(p1, p2);
        },
        p_grid, q_grid, Basis::transformed);

    PurityOptions popt;
    popt.threads = options.threads;
    IeInvariance result;
    result.p_ie_in = purity_numeric(before, popt).purity;
    result.p_ie_out = purity_numeric(after, popt).purity;
    result.analytic = ie_purity(in);
    return result;
}

}  // namespace scatent
