#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <type_traits>
#include <vector>

namespace scatent {

using cplx = std::complex<double>;

// Uniform grid of n nodes on [min, max], endpoints included.
class Grid1D {
public:
    Grid1D(double min, double max, std::size_t n);

    // Grid of n nodes centered on `center` with the given half-width.
    static Grid1D centered(double center, double half_width, std::size_t n);

    double min() const noexcept { return min_; }
    double max() const noexcept { return max_; }
    std::size_t size() const noexcept { return n_; }
    double spacing() const noexcept { return (max_ - min_) / static_cast<double>(n_ - 1); }
    double node(std::size_t i) const noexcept;
    double center() const noexcept { return 0.5 * (min_ + max_); }

    // Trapezoid weights: spacing everywhere, half spacing at the ends.
    std::vector<double> trapezoid_weights() const;
    double weight(std::size_t i) const noexcept;

    Grid1D shifted(double offset) const { return Grid1D(min_ + offset, max_ + offset, n_); }

    bool operator==(const Grid1D&) const = default;

private:
    double min_;
    double max_;
    std::size_t n_;
};

// Neumaier compensated accumulator. Summation order is the call order, so a
// fixed loop order gives bit-identical results.
template <typename T>
class CompensatedSum {
public:
    void add(T x) noexcept
    {
        const T t = sum_ + x;
        if constexpr (std::is_same_v<T, cplx>) {
            comp_ += cplx(fix(sum_.real(), x.real(), t.real()), fix(sum_.imag(), x.imag(), t.imag()));
        } else {
            comp_ += fix(sum_, x, t);
        }
        sum_ = t;
    }
    T value() const noexcept { return sum_ + comp_; }

private:
    static double fix(double s, double x, double t) noexcept
    {
        return (std::abs(s) >= std::abs(x)) ? (s - t) + x : (x - t) + s;
    }
    T sum_{};
    T comp_{};
};

}  // namespace scatent
