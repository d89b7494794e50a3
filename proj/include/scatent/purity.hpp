#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "scatent/wavepacket.hpp"

namespace scatent {

/// One-particle reduced density matrix rho(u, u') sampled on a grid, with
/// the quadrature weights of that grid. Operator traces use the weights:
/// Tr rho = sum_i w_i rho_ii, Tr rho^2 = sum_ij w_i w_j |rho_ij|^2.
class ReducedDensityMatrix {
public:
    ReducedDensityMatrix(Grid1D grid, std::vector<cplx> entries);

    const Grid1D& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return grid_.size(); }
    const cplx& operator()(std::size_t i, std::size_t j) const noexcept { return entries_[i * size() + j]; }

    double trace() const;
    double purity() const;
    double hermiticity_defect() const;

    // Eigenvalues of the sampled integral operator, descending. Diagnostic
    // only: O(N^3) dense Hermitian solve.
    std::vector<double> eigenvalues() const;

private:
    Grid1D grid_;
    std::vector<cplx> entries_;
};

struct PurityOptions {
    // Particle traced out: 2 gives rho_1 on grid1, 1 gives rho_2 on grid2.
    int traced_axis = 2;
    // Mode purities are taken on unnormalized components, so the check can be disabled.
    bool require_normalized = true;
    double normalization_tolerance = 1e-6;
    // Worker threads for the rho build. Results are bit-identical for any value.
    unsigned threads = 1;
};

struct PurityReport {
    double purity = 0.0;
    double trace_check = 0.0;  // Tr rho, equal to the state norm
    std::size_t n1 = 0;
    std::size_t n2 = 0;
    Basis basis = Basis::momentum;
    int traced_axis = 2;
};

ReducedDensityMatrix reduced_density_matrix(const SampledWavefunction& psi, const PurityOptions& options = {});

// Tr(rho^2) through the reduced density matrix: O(N^3) time, O(N^2) memory.
// The formula is the same in every basis, so the basis tag is only reported.
PurityReport purity_numeric(const SampledWavefunction& psi, const PurityOptions& options = {});

struct ModeSplitOptions {
    double orthogonality_tolerance = 1e-6;  // on |<f_i|f_j>| / (|f_i| |f_j|)
    double additivity_tolerance = 1e-7;
    unsigned threads = 1;
};

struct ModeSplitReport {
    std::vector<double> mode_purities;
    double sum = 0.0;     // sum of mode purities
    double total = 0.0;   // purity of the summed state
    double max_overlap = 0.0;
    bool additive = false;  // |total - sum| < additivity_tolerance
};

// Purity of each (unnormalized) mode and of their sum. Modes must share one
// grid. Throws ModeOverlapError if any pair overlaps beyond tolerance.
ModeSplitReport mode_split_purity(std::span<const SampledWavefunction> modes,
                                  const ModeSplitOptions& options = {});

}  // namespace scatent
