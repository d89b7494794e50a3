#include "scatent/smatrix.hpp"

#include <cmath>
#include <sstream>

#include "scatent/errors.hpp"

namespace scatent {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr cplx kI{0.0, 1.0};

AmplitudePair delta_amplitudes(double strength, double q, double m)
{
    const double beta = m * strength / q;
    const cplx denom{1.0, beta};
    return {1.0 / denom, cplx(0.0, -beta) / denom};
}

// cos(kL) and sin(kL)/k as functions of k^2, which stay regular through k = 0
// where the energy crosses the barrier top.
void cos_sinc(double k2, double width, double& c, double& s)
{
    const double x2 = k2 * width * width;
    if (std::abs(x2) < 1e-6) {
        // Taylor series to O(x^6), well below double precision at |x^2| < 1e-6.
        c = 1.0 - x2 / 2.0 + x2 * x2 / 24.0;
        s = width * (1.0 - x2 / 6.0 + x2 * x2 / 120.0);
        return;
    }
    if (k2 > 0.0) {
        const double k = std::sqrt(k2);
        c = std::cos(k * width);
        s = std::sin(k * width) / k;
    } else {
        const double kappa = std::sqrt(-k2);
        c = std::cosh(kappa * width);
        s = std::sinh(kappa * width) / kappa;
    }
}

AmplitudePair square_amplitudes(const SquareBarrier& b, double q, double m)
{
    const double inner_k2 = q * q - 2.0 * m * b.height;
    double c = 0.0;
    double s = 0.0;
    cos_sinc(inner_k2, b.width, c, s);
    const cplx denom = c - kI * (q * q + inner_k2) * s / (2.0 * q);
    const cplx phase = std::polar(1.0, -q * b.width);
    return {phase / denom, phase * kI * (inner_k2 - q * q) * s / (2.0 * q) / denom};
}

AmplitudePair double_delta_amplitudes(const DoubleDelta& dd, double q, double m)
{
    const AmplitudePair one = delta_amplitudes(dd.strength, q, m);
    const cplx e = std::polar(1.0, q * dd.separation);
    const cplx multiple = 1.0 - one.r * one.r * e * e;
    const cplx t = one.t * one.t / multiple;
    const cplx r = one.r / e + one.t * one.t * one.r * e / multiple;
    return {t, r};
}

}  // namespace

void validate(const PotentialModel& model)
{
    std::visit(overloaded{
                   [](const HardWall&) {},
                   [](const DeltaBarrier& d) {
                       if (!std::isfinite(d.strength)) {
                           throw InvalidParameter("delta strength must be finite");
                       }
                   },
                   [](const SquareBarrier& b) {
                       if (!std::isfinite(b.height)) {
                           throw InvalidParameter("square barrier height must be finite");
                       }
                       if (!(b.width > 0.0) || !std::isfinite(b.width)) {
                           throw InvalidParameter("square barrier width must be positive");
                       }
                   },
                   [](const DoubleDelta& d) {
                       if (!std::isfinite(d.strength)) {
                           throw InvalidParameter("double delta strength must be finite");
                       }
                       if (!(d.separation > 0.0) || !std::isfinite(d.separation)) {
                           throw InvalidParameter("double delta separation must be positive");
                       }
                   },
               },
               model);
}

std::string describe(const PotentialModel& model)
{
    std::ostringstream out;
    std::visit(overloaded{
                   [&](const HardWall&) { out << "hard_wall"; },
                   [&](const DeltaBarrier& d) { out << "delta(strength=" << d.strength << ")"; },
                   [&](const SquareBarrier& b) {
                       out << "square(height=" << b.height << ", width=" << b.width << ")";
                   },
                   [&](const DoubleDelta& d) {
                       out << "double_delta(strength=" << d.strength << ", separation=" << d.separation << ")";
                   },
               },
               model);
    return out.str();
}

AmplitudePair amplitudes(const PotentialModel& model, double q, double reduced_mass)
{
    if (!(q > 0.0) || !std::isfinite(q)) {
        throw DomainError("amplitudes need relative momentum q > 0");
    }
    if (!(reduced_mass > 0.0)) {
        throw DomainError("amplitudes need a positive reduced mass");
    }
    return std::visit(overloaded{
                          [](const HardWall&) { return AmplitudePair{0.0, -1.0}; },
                          [&](const DeltaBarrier& d) { return delta_amplitudes(d.strength, q, reduced_mass); },
                          [&](const SquareBarrier& b) { return square_amplitudes(b, q, reduced_mass); },
                          [&](const DoubleDelta& d) { return double_delta_amplitudes(d, q, reduced_mass); },
                      },
                      model);
}

AmplitudeTable tabulate_amplitudes(const PotentialModel& model, std::span<const double> q_grid,
                                   double reduced_mass)
{
    if (q_grid.size() < 2) {
        throw InvalidParameter("amplitude table needs at least 2 q nodes");
    }
    for (std::size_t i = 0; i < q_grid.size(); ++i) {
        if (!(q_grid[i] > 0.0)) {
            throw DomainError("amplitude table q nodes must be positive");
        }
        if (i > 0 && !(q_grid[i] > q_grid[i - 1])) {
            throw InvalidParameter("amplitude table q nodes must be strictly ascending");
        }
    }
    AmplitudeTable table;
    table.q.assign(q_grid.begin(), q_grid.end());
    for (double q : q_grid) {
        const AmplitudePair a = amplitudes(model, q, reduced_mass);
        table.t.push_back(a.t);
        table.r.push_back(a.r);
    }
    const std::size_t n = q_grid.size();
    auto derivative = [&](const std::vector<cplx>& f, std::size_t i) {
        const std::size_t lo = i == 0 ? 0 : i - 1;
        const std::size_t hi = i + 1 == n ? i : i + 1;
        return (f[hi] - f[lo]) / (q_grid[hi] - q_grid[lo]);
    };
    for (std::size_t i = 0; i < n; ++i) {
        table.dt.push_back(derivative(table.t, i));
        table.dr.push_back(derivative(table.r, i));
    }
    return table;
}

}  // namespace scatent
