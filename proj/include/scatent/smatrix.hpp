#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "scatent/grid.hpp"

namespace scatent {

// Potentials in the relative coordinate x = x2 - x1, all centered on x = 0.
struct HardWall {};
struct DeltaBarrier {
    double strength = 0.0;  // V(x) = strength * delta(x)
};
struct SquareBarrier {
    double height = 0.0;  // V0 on |x| < width / 2; negative for a well
    double width = 1.0;
};
struct DoubleDelta {
    double strength = 0.0;  // strength * (delta(x + d/2) + delta(x - d/2))
    double separation = 1.0;
};

using PotentialModel = std::variant<HardWall, DeltaBarrier, SquareBarrier, DoubleDelta>;

// Throws InvalidParameter for non-finite parameters or non-positive widths.
void validate(const PotentialModel& model);
std::string describe(const PotentialModel& model);

/// Transmission and reflection amplitudes for a wave exp(i q x) incident from
/// the left. The hard wall carries the phase convention r = -1.
struct AmplitudePair {
    cplx t;
    cplx r;

    double transmission() const noexcept { return std::norm(t); }
    double reflection() const noexcept { return std::norm(r); }
};

// Closed-form amplitudes at relative momentum q > 0 for reduced mass m > 0
// (hbar = 1, so q is also the wave number). Throws DomainError for q <= 0 or m <= 0.
AmplitudePair amplitudes(const PotentialModel& model, double q, double reduced_mass);

struct AmplitudeTable {
    std::vector<double> q;
    std::vector<cplx> t;
    std::vector<cplx> r;
    std::vector<cplx> dt;  // d t / d q
    std::vector<cplx> dr;  // d r / d q
};

// Amplitudes on an ascending, strictly positive q grid with derivative
// estimates: centered differences inside, one-sided at the ends.
AmplitudeTable tabulate_amplitudes(const PotentialModel& model, std::span<const double> q_grid,
                                   double reduced_mass);

}  // namespace scatent
