#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hs2/grid.hpp"

namespace hs2 {

/// Gauge tolerance: |energy - 4| must stay below this for a valid datum.
constexpr double kGaugeTol = 1e-8;
/// Matching tolerance for level values in the exact (structured) mode.
constexpr double kLevelTol = 1e-9;
/// Default band half-width for zero-set detection on sampled data.
constexpr double kZeroBandEps = 1e-9;

/// Closed interval on the circle, in unwrapped coordinates: lo may be
/// negative when a run crosses x = 0; then the interval means
/// [lo + 1, 1) union [0, hi].
struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double length() const { return hi - lo; }
};

/// Exact piecewise-constant description of (u_x, rho). Sampling convention
/// everywhere is right-continuous: a node sitting on a breakpoint takes the
/// value of the piece that starts there.
struct StructuredDatum {
    std::vector<double> breakpoints;  // 0 = b_0 < b_1 < ... < b_m = 1
    std::vector<double> ux;           // u_x on [b_i, b_{i+1})
    std::vector<double> rho;          // rho on [b_i, b_{i+1})

    int pieces() const { return static_cast<int>(ux.size()); }
    double piece_length(int i) const { return breakpoints[i + 1] - breakpoints[i]; }
    int piece_index(double x) const;

    /// u(x) = int_0^x u_x, evaluated exactly (piecewise linear).
    double u_at(double x) const;

    /// Periodicity (sum ux * length = 0 within 1e-12) and gauge
    /// (sum (ux^2 + rho^2) * length = 4 within 1e-12).
    void validate() const;
};

/// Initial pair (u, rho) in the normalized gauge |u_x|^2 + |rho|^2 = 4 with
/// u(0) = 0, sampled on a grid, optionally with the exact structured form.
struct InitialDatum {
    GridFn u;
    GridFn rho;
    GridFn ux;  // cached u_x
    std::optional<StructuredDatum> structured;
    double energy = 0.0;

    int n() const { return u.n(); }
    const PeriodicGrid& grid() const { return u.grid; }
};

/// Build from samples; u_x is the collocation derivative of u. Validates
/// u(0) = 0, mean-zero u_x, and the gauge.
InitialDatum datum_from_samples(GridFn u, GridFn rho);

/// Build from the exact piecewise form, sampled on n nodes (u exactly,
/// u_x and rho right-continuously). Validates the structured invariants.
InitialDatum datum_from_structured(StructuredDatum sd, int n);

/// Scale (u, rho) -> (alpha u, alpha rho) with alpha = 2/sqrt(E0) so the
/// gauge energy is exactly 4; returns the datum and alpha. Under the scaling
/// u(t,x) -> alpha u(alpha t, x), a feature at normalized time t corresponds
/// to original time alpha * t. Rejects the zero datum and u(0) != 0.
std::pair<InitialDatum, double> normalize(const GridFn& u, const GridFn& rho);

/// Intervals where rho vanishes: exact union of pieces for structured data
/// (adjacent and wrap-around runs merged), maximal |rho| <= eps node runs
/// reported as [x_first, x_last] for sampled data.
std::vector<Interval> zero_set(const InitialDatum& d, double eps);

/// Lebesgue measure of {u_x = c} ∩ {rho = 0}. Exact mode for structured
/// data (level matched within kLevelTol); for sampled data the eps-band
/// estimate (1/n) * #{j : |ux_j - c| <= eps and |rho_j| <= eps}.
double level_set_measure(const InitialDatum& d, double c, double eps);

/// First time the flow map flattens: pi/2 + arctan(m/2) with m the minimum
/// of u_x over {rho = 0}; +infinity when rho never vanishes.
double breakdown_time(const InitialDatum& d);

// Named fixtures used across the suite. All carry gauge energy 4.
InitialDatum datum_stat(int n);      // u = 0, rho = 2 (stationary)
InitialDatum datum_smooth(int n);    // u = sin(2 pi x)/(sqrt(2) pi), rho = sqrt(3)
InitialDatum datum_pw(int n);        // breakpoints (0,1/4,1/2,1), ux (-2,2,0), rho (0,0,2)
InitialDatum datum_pw_zero_min(int n);  // min of u_x over {rho=0} equal to 0

/// Datum files: JSON with either
///   {"samples": {"n": int, "u": [...], "rho": [...]}}
/// or
///   {"structured": {"breakpoints": [...], "ux": [...], "rho": [...]}}.
/// Sampled data are resampled band-limitedly when n differs from the file.
/// Unnormalized data are refused unless auto_normalize is set; the applied
/// alpha is written to *alpha_out when provided.
InitialDatum load_datum(const std::string& path, int n, bool auto_normalize,
                        double* alpha_out = nullptr);

void save_datum_samples(const InitialDatum& d, const std::string& path);

}  // namespace hs2
