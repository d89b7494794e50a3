#pragma once

#include <cstddef>

#include "scatent/purity.hpp"
#include "scatent/smatrix.hpp"
#include "scatent/transforms.hpp"
#include "scatent/wavepacket.hpp"

namespace scatent {

struct ScatterOptions {
    std::size_t n = 256;   // nodes per axis of the out-state grid
    double window = 8.0;   // grid half-width beyond each lobe, in widths
    double overlap_tolerance = 1e-6;        // boundary condition on |int phi_1 phi_2|
    double negative_q_tolerance = 1e-12;    // in-state mass allowed at q12 <= 0
    double norm_tolerance = 1e-8;           // |T + R - 1| on the out grid
    double orthogonality_tolerance = 1e-6;  // transmitted/reflected mode overlap
    CoveragePolicy coverage = CoveragePolicy::error;  // on a T + R miss or grid tail mass
    unsigned threads = 1;
};

/// Result of the scattering-boundary-condition test on an in-state.
struct BoundaryReport {
    double k = 0.0;                // mean relative momentum in the COM frame
    double overlap = 0.0;          // |int phi_1(p) phi_2(p) dp|
    double negative_q_mass = 0.0;  // probability at q12 <= 0
    bool approaching = false;      // k > 0
    bool overlap_ok = false;
    bool negative_q_ok = false;

    bool ok() const noexcept { return approaching && overlap_ok && negative_q_ok; }
};

// Evaluated on the COM-frame version of the state.
BoundaryReport check_boundary_conditions(const GaussianProductState& in, const ScatterOptions& options = {});

/// Out-state split into its transmitted and reflected modes on one grid.
struct OutState {
    SampledWavefunction phi_tra;
    SampledWavefunction phi_ref;
    double transmission = 0.0;  // T = |phi_tra|^2
    double reflection = 0.0;    // R = |phi_ref|^2
    double mode_overlap = 0.0;  // |<phi_tra|phi_ref>| / sqrt(T R), zero if either mode vanishes
    double k = 0.0;
    Masses masses;

    SampledWavefunction total() const { return phi_tra + phi_ref; }
};

// Closed-form construction for a Gaussian in-state:
//   phi_tra(p) = t(q12) phi_in(p),  phi_ref(p) = r(q_in) phi_in(M p),
// with q_in = q12(M p) the incoming relative momentum. A state outside the
// COM frame is first brought there by a Galilean boost.
// Throws BoundaryConditionError or CoverageError.
OutState out_state(const GaussianProductState& in, const PotentialModel& model,
                   const ScatterOptions& options = {});

// Same for a sampled momentum-basis in-state; the M relabeling and the
// resampling onto the symmetric out grid use GridInterpolator.
OutState out_state(const SampledWavefunction& in, const Masses& masses, const PotentialModel& model,
                   const ScatterOptions& options = {});

struct SplitPurity {
    double p_tra = 0.0;
    double p_ref = 0.0;
    double p_total = 0.0;

    double residual() const noexcept { return p_total - p_tra - p_ref; }
};

// Throws ModeOverlapError if out.mode_overlap >= options.orthogonality_tolerance.
SplitPurity split_purity(const OutState& out, const ScatterOptions& options = {});

// T^2 + R^2 * reflection_purity(in). Requires T, R in [0, 1] with T + R = 1.
double constant_amplitude_purity(const GaussianProductState& in, double transmission, double reflection);

// T^2 + R^2, the purity of rho_1 = diag(T, R).
double qubit_model_purity(double transmission, double reflection);

struct VariationDiagnostic {
    double k = 0.0;
    double delta_q = 0.0;
    double t_variation = 0.0;  // delta_q |dt/dq| / |t| at q = k
    double r_variation = 0.0;
    bool t_defined = false;    // false when |t(k)| <= 1e-6 (hard wall, or r at a transmission resonance)
    bool r_defined = false;

    // Largest defined variation.
    double value() const noexcept;
    bool constant_amplitude_valid(double threshold = 0.1) const noexcept { return value() < threshold; }
};

// delta_q comes from the moments of the sampled in-state.
VariationDiagnostic amplitude_variation_diagnostic(const PotentialModel& model, const GaussianProductState& in,
                                                   const ScatterOptions& options = {});

struct IeInvariance {
    double p_ie_in = 0.0;
    double p_ie_out = 0.0;
    double analytic = 0.0;  // ie_purity(in)

    double residual() const noexcept { return p_ie_out - p_ie_in; }
};

// Purity in the (P, q) factorization before and after scattering, both sampled
// in closed form on a symmetric (P, q) grid.
IeInvariance ie_purity_invariance_check(const GaussianProductState& in, const PotentialModel& model,
                                        const ScatterOptions& options = {});

}  // namespace scatent
