#include "hs2/circle_calculus.hpp"

#include <cmath>
#include <stdexcept>

#include "hs2/fourier.hpp"

namespace hs2 {

double integrate(const GridFn& f) {
    double acc = 0.0;
    for (double v : f.values) acc += v;
    return acc / f.n();
}

GridFn cumulative_integral(const GridFn& f, CumulativeMethod method) {
    const int n = f.n();
    GridFn out(f.grid);
    if (method == CumulativeMethod::trapezoid) {
        out[0] = 0.0;
        const double h = f.grid.spacing();
        for (int j = 1; j < n; ++j)
            out[j] = out[j - 1] + 0.5 * h * (f[j - 1] + f[j]);
        return out;
    }
    const double mean = integrate(f);
    std::vector<double> periodic = fourier::antiderivative(f.values);
    for (int j = 0; j < n; ++j) out[j] = mean * f.grid.node(j) + periodic[j];
    return out;
}

GridFn derivative(const GridFn& f, DerivativeMethod method) {
    const int n = f.n();
    GridFn out(f.grid);
    if (method == DerivativeMethod::fourier) {
        out.values = fourier::derivative(f.values);
        return out;
    }
    const double half_inv_h = 0.5 * n;
    for (int j = 0; j < n; ++j)
        out[j] = (f.at_wrapped(j + 1) - f.at_wrapped(j - 1)) * half_inv_h;
    return out;
}

GridFn inverse_A(const GridFn& f) {
    const double mean = integrate(f);
    if (std::abs(mean) > kMeanZeroTol)
        throw std::invalid_argument(
            "inverse_A: input mean " + std::to_string(mean) +
            " exceeds tolerance; apply mean_zero_project first");
    // First cumulative integral F(y) = int_0^y f; f is mean-zero so F is the
    // periodic antiderivative pinned at 0. Then
    //   g = -int_0^x F + x int_0^1 F = -(periodic antiderivative of F - mean F),
    // because the secular parts cancel.
    std::vector<double> F = fourier::antiderivative(f.values);
    std::vector<double> P = fourier::antiderivative(F);
    GridFn out(f.grid);
    for (int j = 0; j < f.n(); ++j) out[j] = -P[j];
    return out;
}

GridFn mean_zero_project(const GridFn& f) {
    const double mean = integrate(f);
    GridFn out(f.grid);
    for (int j = 0; j < f.n(); ++j) out[j] = f[j] - mean;
    return out;
}

double l2_norm_sq(const GridFn& f) {
    double acc = 0.0;
    for (double v : f.values) acc += v * v;
    return acc / f.n();
}

double integrate_where(const GridFn& f, const std::vector<uint8_t>& keep) {
    if (keep.size() != f.values.size())
        throw std::invalid_argument("integrate_where: mask length mismatch");
    double acc = 0.0;
    for (int j = 0; j < f.n(); ++j)
        if (keep[static_cast<std::size_t>(j)]) acc += f[j];
    return acc / f.n();
}

}  // namespace hs2
