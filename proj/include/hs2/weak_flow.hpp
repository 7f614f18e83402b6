#pragma once

#include "hs2/lagrangian.hpp"

namespace hs2 {

/// varrho(t, x) = rho(x) * int_0^t chi_{phi_x(s,.) > 0} / phi_x(s, x) ds,
/// computed per node with composite Simpson quadrature in s from the
/// closed-form phi_x; abscissae with phi_x below the flat threshold
/// contribute 0 (the chi cutoff). Requires steps >= 32.
GridFn varrho_integral(const InitialDatum& d, double t, int steps);

struct WeakFlowState {
    double t = 0.0;
    LagrangianState lag;
    GridFn varrho;    // time integral above; varrho(0, .) = 0
    GridFn varrho_t;  // rho * chi_{phi_x > 0} / phi_x, exactly 0 on flats
};
WeakFlowState weak_flow_state(const InitialDatum& d, double t, int steps = 256);

/// Generalized inverse psi(y) = min{x : phi(x) >= y} of a nondecreasing
/// polyline with phi(0) = 0, phi(1) = 1, sampled on the same grid; flat
/// regions map to their left endpoint. Rejects non-monotone input.
GridFn pseudo_inverse(const GridFn& phi);

/// Eulerian fields at time t on the fixed grid: u(y) = phi_t(psi(y)),
/// rho(y) = (rho / phi_x)(psi(y)), u_x(y) = (phi_tx / phi_x)(psi(y)).
/// u_x and rho carry NaN and the mask on nodes whose preimage lies in a
/// flat region. Structured data are composed through the exact piecewise
/// flow; sampled data through piecewise-linear inversion/interpolation.
struct EulerianFields {
    double t = 0.0;
    GridFn u;
    GridFn u_x;
    GridFn rho;
    std::vector<uint8_t> masked;
    double unmasked_fraction = 1.0;
};
EulerianFields eulerian_fields(const InitialDatum& d, double t);

/// Measured energy |u_x|^2 + |rho|^2 via the Lagrangian change of variables:
/// 4 * integral over {phi_x > eps} of (f_t^2 + g_t^2).
double measured_energy(const InitialDatum& d, double t);

struct EnergyReport {
    double t = 0.0;
    double measured_E = 0.0;
    double predicted_E = 0.0;   // 4 - (4 / sin^2 t) * defect_measure
    double defect_measure = 0.0;
    bool is_defect_time = false;
};
EnergyReport energy_report(const InitialDatum& d, double t, double eps = kZeroBandEps);

/// Times in [0, pi) at which the defect measure is positive; exact for
/// structured data (arccot(-p/2) per zero-set piece value p), empty for
/// sampled data.
std::vector<double> defect_times(const InitialDatum& d);

/// True when t is within radius of a defect time modulo pi.
bool near_defect_time(const InitialDatum& d, double t, double radius);

/// Tangent-space membership at base point (phi, varrho): U(0) = 0, panel
/// slopes of U vanish on detected-flat panels, and the metric integral
///   int_{S \ N} U_x^2 / phi_x + (F - varrho)^2 phi_x dx
/// is finite; inner_product is a quarter of it (the diagonal inner product).
struct TangentReport {
    bool u0_ok = false;
    bool flat_ok = false;
    double u0_value = 0.0;
    double flat_max_slope = 0.0;
    double integral = 0.0;
    double inner_product = 0.0;
    bool pass() const;
};
TangentReport tangent_membership(const GridFn& U, const GridFn& F, const GridFn& phi,
                                 const GridFn& varrho, double eps);

}  // namespace hs2
