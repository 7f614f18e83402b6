#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include "hs2/datum.hpp"

namespace hs2 {

/// z = U + i*R along a characteristic, U = u_x(t, phi), R = rho(t, phi).
using ComplexChar = std::complex<double>;

/// Modulus threshold on z0*sin(t) + 2*cos(t) below which the characteristic
/// has blown up.
constexpr double kRiccatiDenomTol = 1e-14;

/// Relative threshold for detecting flat regions of phi: a node is flat when
/// phi_x <= 1e-12 * max(phi_x).
constexpr double kFlatRel = 1e-12;

struct RiccatiBlowup : std::runtime_error {
    double t;
    ComplexChar z0;
    RiccatiBlowup(double t_, ComplexChar z0_);
};

/// Closed-form solution of z' = -(z^2 + 4)/2, z(0) = z0, evaluated in the
/// pole-free form (2 z0 cos t - 4 sin t) / (z0 sin t + 2 cos t). Throws
/// RiccatiBlowup when the denominator modulus drops below kRiccatiDenomTol.
ComplexChar riccati_solve(ComplexChar z0, double t);

struct FG {
    GridFn f;  // cos t + (u_x/2) sin t
    GridFn g;  // (rho/2) sin t
};
FG fg(const InitialDatum& d, double t);

/// Snapshot of the Lagrangian flow at time t. U and R carry NaN on flat
/// nodes (phi_x below threshold) with the flat mask set; blow-up is
/// represented, never thrown, so the flow continues through breakdown.
struct LagrangianState {
    double t = 0.0;
    GridFn phi;      // flow map, phi(0) = 0
    GridFn phi_x;    // f^2 + g^2
    GridFn phi_t;    // Lagrangian velocity, phi_t(0) = phi_t(1) = 0
    GridFn phi_tx;   // 2 (f f_t + g g_t)
    GridFn U;        // u_x o phi = phi_tx / phi_x on unflat nodes
    GridFn R;        // rho o phi = rho / phi_x on unflat nodes
    GridFn f, g;
    std::vector<uint8_t> flat;  // 1 where phi_x <= eps_flat_abs
    double eps_flat_abs = 0.0;
};
LagrangianState flow_map(const InitialDatum& d, double t);

/// B(t) = {rho = 0} ∩ {u_x = -2 cot t}; empty when sin t = 0. Exact
/// intervals for structured data, eps-band node runs otherwise.
std::vector<Interval> breakdown_set(const InitialDatum& d, double t, double eps);

/// Cross-check of the breakdown-time formula from the closed-form phi_x:
/// the first t in (0, pi) at which min_x phi_x(t, .) reaches zero. For
/// structured data this bisects the signed factor f on the zero set of rho
/// (transversal crossing, accurate to ~1e-12); for sampled data it bisects
/// the predicate min phi_x <= 1e-10, which localizes a quadratic touch only
/// to about sqrt(1e-10). Returns +infinity when the flow never flattens.
double first_flat_time(const InitialDatum& d);

/// Exact per-piece flow data for a structured datum at time t: closed-form
/// piece values, exact cumulative phi and phi_t at breakpoints, and the
/// generalized inverse. Shared by the Eulerian reconstruction and the weak
/// residual projections.
struct StructuredFlow {
    double t = 0.0;
    std::vector<double> a;        // breakpoints, size m+1
    std::vector<double> f, g, ft, gt;
    std::vector<double> phi_x;    // f^2 + g^2 per piece
    std::vector<double> phi_tx;   // 2 (f ft + g gt) per piece
    std::vector<double> U, R;     // valid on unflat pieces, NaN otherwise
    std::vector<double> phi_a;    // phi at breakpoints, phi_a[0] = 0
    std::vector<double> phit_a;   // phi_t at breakpoints
    std::vector<uint8_t> flat;
    double eps_flat_abs = 0.0;

    int pieces() const { return static_cast<int>(phi_x.size()); }
    double phi_at(double x) const;
    double phit_at(double x) const;
    /// min{x : phi(x) >= y} for y in [0, 1]; *piece_out gets the piece the
    /// returned point lies in (right-continuous at piece starts).
    double psi_at(double y, int* piece_out = nullptr) const;
};
StructuredFlow structured_flow(const StructuredDatum& sd, double t);

}  // namespace hs2
