#include "scatent/purity.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "scatent/errors.hpp"

namespace scatent {

ReducedDensityMatrix::ReducedDensityMatrix(Grid1D grid, std::vector<cplx> entries)
    : grid_(std::move(grid)), entries_(std::move(entries))
{
    if (entries_.size() != grid_.size() * grid_.size()) {
        throw InvalidParameter("density matrix size does not match its grid");
    }
}

double ReducedDensityMatrix::trace() const
{
    CompensatedSum<double> acc;
    for (std::size_t i = 0; i < size(); ++i) {
        acc.add(grid_.weight(i) * (*this)(i, i).real());
    }
    return acc.value();
}

double ReducedDensityMatrix::purity() const
{
    CompensatedSum<double> acc;
    for (std::size_t i = 0; i < size(); ++i) {
        CompensatedSum<double> row;
        for (std::size_t j = 0; j < size(); ++j) {
            row.add(grid_.weight(j) * std::norm((*this)(i, j)));
        }
        acc.add(grid_.weight(i) * row.value());
    }
    return acc.value();
}

double ReducedDensityMatrix::hermiticity_defect() const
{
    double d = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            d = std::max(d, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
        }
    }
    return d;
}

std::vector<double> ReducedDensityMatrix::eigenvalues() const
{
    const auto n = static_cast<Eigen::Index>(size());
    Eigen::MatrixXcd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double wi = std::sqrt(grid_.weight(static_cast<std::size_t>(i)));
        for (Eigen::Index j = 0; j < n; ++j) {
            const double wj = std::sqrt(grid_.weight(static_cast<std::size_t>(j)));
            a(i, j) = wi * (*this)(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) * wj;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericError("eigenvalue solve of the reduced density matrix failed");
    }
    std::vector<double> ev(solver.eigenvalues().data(), solver.eigenvalues().data() + n);
    std::sort(ev.begin(), ev.end(), std::greater<>());
    return ev;
}

namespace {

// rho(i, j) = sum_l w_l phi(i, l) conj(phi(j, l)) for the kept axis i. Real and
// imaginary parts are split so the inner loops vectorize. Each entry is one
// fixed-order dot product, so the thread count does not change any bit.
std::vector<cplx> build_rho(const SampledWavefunction& psi, unsigned threads)
{
    const std::size_t n = psi.n1();
    const std::size_t m = psi.n2();
    std::vector<double> re(n * m);
    std::vector<double> im(n * m);
    std::vector<double> wre(n * m);
    std::vector<double> wim(n * m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t l = 0; l < m; ++l) {
            const cplx f = psi(i, l);
            const double w = psi.grid2().weight(l);
            re[i * m + l] = f.real();
            im[i * m + l] = f.imag();
            wre[i * m + l] = w * f.real();
            wim[i * m + l] = w * f.imag();
        }
    }

    std::vector<cplx> rho(n * n);
    auto rows = [&](std::size_t first, std::size_t stride) {
        for (std::size_t i = first; i < n; i += stride) {
            const double* ar = &re[i * m];
            const double* ai = &im[i * m];
            for (std::size_t j = 0; j <= i; ++j) {
                const double* br = &wre[j * m];
                const double* bi = &wim[j * m];
                double sr = 0.0;
                double si = 0.0;
                for (std::size_t l = 0; l < m; ++l) {
                    // phi_i * conj(w phi_j)
                    sr += ar[l] * br[l] + ai[l] * bi[l];
                    si += ai[l] * br[l] - ar[l] * bi[l];
                }
                if (j == i) {
                    si = 0.0;
                }
                rho[i * n + j] = {sr, si};
                rho[j * n + i] = {sr, -si};
            }
        }
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
    if (workers == 1) {
        rows(0, 1);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned t = 0; t < workers; ++t) {
            pool.emplace_back(rows, t, workers);
        }
    }
    return rho;
}

}  // namespace

ReducedDensityMatrix reduced_density_matrix(const SampledWavefunction& psi, const PurityOptions& options)
{
    if (options.traced_axis != 1 && options.traced_axis != 2) {
        throw InvalidParameter("traced_axis must be 1 or 2");
    }
    if (options.require_normalized) {
        const double norm = psi.norm();
        if (!(std::abs(norm - 1.0) <= options.normalization_tolerance)) {
            std::ostringstream msg;
            msg << "state norm " << norm << " deviates from 1 by more than "
                << options.normalization_tolerance;
            throw NormalizationError(msg.str(), norm);
        }
    }
    if (options.traced_axis == 2) {
        return {psi.grid1(), build_rho(psi, options.threads)};
    }
    const SampledWavefunction t = psi.transposed();
    return {t.grid1(), build_rho(t, options.threads)};
}

PurityReport purity_numeric(const SampledWavefunction& psi, const PurityOptions& options)
{
    const ReducedDensityMatrix rho = reduced_density_matrix(psi, options);
    PurityReport report;
    report.purity = rho.purity();
    report.trace_check = rho.trace();
    report.n1 = psi.n1();
    report.n2 = psi.n2();
    report.basis = psi.basis();
    report.traced_axis = options.traced_axis;
    return report;
}

ModeSplitReport mode_split_purity(std::span<const SampledWavefunction> modes, const ModeSplitOptions& options)
{
    if (modes.empty()) {
        throw InvalidParameter("mode_split_purity needs at least one mode");
    }
    std::vector<double> norms;
    norms.reserve(modes.size());
    for (const auto& f : modes) {
        norms.push_back(std::sqrt(f.norm()));
    }

    ModeSplitReport report;
    for (std::size_t a = 0; a < modes.size(); ++a) {
        for (std::size_t b = a + 1; b < modes.size(); ++b) {
            if (norms[a] == 0.0 || norms[b] == 0.0) {
                continue;
            }
            const double overlap = std::abs(inner_product(modes[a], modes[b])) / (norms[a] * norms[b]);
            report.max_overlap = std::max(report.max_overlap, overlap);
            if (!(overlap < options.orthogonality_tolerance)) {
                std::ostringstream msg;
                msg << "modes " << a << " and " << b << " overlap: |<f_i|f_j>| / (|f_i||f_j|) = " << overlap
                    << " >= " << options.orthogonality_tolerance;
                throw ModeOverlapError(msg.str(), overlap);
            }
        }
    }

    PurityOptions popt;
    popt.require_normalized = false;
    popt.threads = options.threads;
    CompensatedSum<double> sum;
    SampledWavefunction total = modes.front();
    for (std::size_t a = 0; a < modes.size(); ++a) {
        const double p = purity_numeric(modes[a], popt).purity;
        report.mode_purities.push_back(p);
        sum.add(p);
        if (a > 0) {
            total = total + modes[a];
        }
    }
    report.sum = sum.value();
    report.total = purity_numeric(total, popt).purity;
    report.additive = std::abs(report.total - report.sum) < options.additivity_tolerance;
    return report;
}

}  // namespace scatent
