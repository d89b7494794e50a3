#pragma once

#include <cmath>
#include <random>

#include "scatent/transforms.hpp"
#include "scatent/wavepacket.hpp"

namespace test_support {

// Correlated Gaussian relabeled as a momentum-basis state: a smooth,
// entangled state with known purity.
inline scatent::SampledWavefunction entangled_state(std::size_t n, double window = 8.0)
{
    const auto g = scatent::GaussianProductState::make({0.5, -0.5, 0.0, 0.0, 1.0, 2.0, 1.0, 1.0});
    const scatent::LinearMap2 shear(1.0, 1.0, 0.5, -0.5);
    return scatent::sample_gaussian_under_map(g, shear, n, window).with_basis(scatent::Basis::momentum);
}

// Random map with |det| = 1: rotation, then squeeze diag(s, 1/s), then an
// optional sign flip of the second row.
inline scatent::LinearMap2 random_map(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> log_squeeze(std::log(0.5), std::log(2.0));
    std::bernoulli_distribution flip(0.5);
    const double a = angle(rng);
    const double s = std::exp(log_squeeze(rng));
    const double f = flip(rng) ? -1.0 : 1.0;
    const double c = std::cos(a);
    const double sn = std::sin(a);
    return {s * c, -s * sn, f * sn / s, f * c / s};
}

}  // namespace test_support
