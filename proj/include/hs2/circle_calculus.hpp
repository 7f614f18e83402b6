#pragma once

#include "hs2/grid.hpp"

namespace hs2 {

/// Absolute tolerance below which a field counts as mean-zero.
constexpr double kMeanZeroTol = 1e-10;

enum class CumulativeMethod {
    trapezoid,  // composite trapezoid over [0, x_j]; exact for piecewise-constant
                // samples whose jumps sit on grid nodes (right-continuous sampling)
    spectral    // Fourier antiderivative plus the secular mean term; spectrally
                // accurate for smooth integrands, used by inverse_A and the
                // Christoffel operator
};

enum class DerivativeMethod {
    fourier,   // collocation derivative, Nyquist zeroed
    centered   // second-order centered difference, for non-smooth samples
};

/// Periodic quadrature: (1/n) * sum f(x_j). Exact for trigonometric
/// polynomials of degree < n.
double integrate(const GridFn& f);

/// F with F(x_0) = 0 and F(x_j) ~ integral of f over [0, x_j].
GridFn cumulative_integral(const GridFn& f,
                           CumulativeMethod method = CumulativeMethod::trapezoid);

GridFn derivative(const GridFn& f, DerivativeMethod method = DerivativeMethod::fourier);

/// Inverse inertia operator on mean-zero input:
///   g(x) = -int_0^x int_0^y f dz dy + x * int_0^1 int_0^y f dz dy,
/// realized with spectral cumulative integrals so that -g'' = f holds in the
/// collocation sense; g(0) = g(1) = 0. Rejects input whose mean exceeds
/// kMeanZeroTol (the caller forgot mean_zero_project).
GridFn inverse_A(const GridFn& f);

GridFn mean_zero_project(const GridFn& f);

/// integrate(f^2) >= 0.
double l2_norm_sq(const GridFn& f);

/// (1/n) * sum over nodes where keep[j] != 0. Restricted integral in the
/// sense of an integral over a subset, without weight renormalization.
double integrate_where(const GridFn& f, const std::vector<uint8_t>& keep);

}  // namespace hs2
