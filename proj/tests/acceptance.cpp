// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. Tolerances are pinned here, not calibrated at run time.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "hs2/circle_calculus.hpp"
#include "hs2/geodesic.hpp"
#include "test_support.hpp"

using namespace hs2;

namespace {

constexpr double kPi = 3.141592653589793238462643383279;

int g_failures = 0;

void record(int idx, const std::string& name, bool ok, const std::string& detail) {
    std::printf("[%s] %2d %s: %s\n", ok ? "PASS" : "FAIL", idx, name.c_str(),
                detail.c_str());
    if (!ok) ++g_failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

// 1. Breakdown-time formula on the named fixtures.
void criterion_breakdown_formula() {
    const double t_pw = breakdown_time(datum_pw(256));
    const double t_zero = breakdown_time(datum_pw_zero_min(256));
    const double t_stat = breakdown_time(datum_stat(256));
    const double t_smooth = breakdown_time(datum_smooth(256));
    const bool ok = t_pw == kPi / 4.0 && t_zero == kPi / 2.0 && std::isinf(t_stat) &&
                    std::isinf(t_smooth);
    record(1, "breakdown-time formula", ok,
           "T*(pw) = " + fmt(t_pw) + ", T*(zero-min) = " + fmt(t_zero) +
               ", T*(stat) = T*(smooth) = inf");
}

// 2. Cross-verification of T* from the closed-form phi_x.
void criterion_breakdown_crosscheck() {
    const InitialDatum pw = datum_pw(256);
    const double bisected = first_flat_time(pw);
    const double formula = breakdown_time(pw);
    const double err = std::abs(bisected - formula);
    record(2, "T* cross-verification", err <= 1e-8,
           "|t_flat - T*| = " + fmt(err) + " (tol 1e-8)");
}

// 3. Conservation a.e.: 200 random times away from defect neighborhoods.
void criterion_conservation() {
    const int n = 512;
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> tdist(0.0, 2.0 * kPi);
    double worst = 0.0;
    for (const InitialDatum& d : {datum_smooth(n), datum_pw(n)}) {
        int done = 0;
        while (done < 200) {
            const double t = tdist(rng);
            if (near_defect_time(d, t, 1e-3)) continue;
            ++done;
            worst = std::max(worst, std::abs(measured_energy(d, t) - 4.0));
        }
    }
    record(3, "conservation a.e.", worst <= 1e-6,
           "max |E - 4| = " + fmt(worst) + " over 2x200 samples (tol 1e-6)");
}

// 4. Defect law at the two defect times of the piecewise datum.
void criterion_defect_law() {
    const InitialDatum pw = datum_pw(512);
    bool ok = true;
    double worst = 0.0;
    for (double t : {kPi / 4.0, 3.0 * kPi / 4.0}) {
        const EnergyReport rep = energy_report(pw, t);
        ok = ok && rep.defect_measure == 0.25;
        worst = std::max({worst, std::abs(rep.measured_E - 2.0),
                          std::abs(rep.predicted_E - 2.0),
                          std::abs(rep.measured_E - rep.predicted_E)});
    }
    ok = ok && worst <= 1e-6;
    record(4, "defect law", ok,
           "defect measure exact 1/4, max deviation from E = 2: " + fmt(worst) +
               " (tol 1e-6)");
}

// 5. Oracle equivalence and spatial convergence of the explicit composition.
void criterion_oracle_equivalence() {
    auto distance = [](int n) {
        const InitialDatum d = datum_smooth(n);
        const OracleResult res = oracle_solve(d, 0.3, n, 1e-4);
        const EulerianFields expl = eulerian_fields(d, 0.3);
        GridFn du = zip(res.fields.u, expl.u, [](double a, double b) { return a - b; });
        GridFn dr = zip(res.fields.rho, expl.rho, [](double a, double b) { return a - b; });
        return std::sqrt(l2_norm_sq(du) + l2_norm_sq(dr));
    };
    const double e256 = distance(256);
    const double e512 = distance(512);
    const bool ok = e256 <= 1e-4 && e256 / e512 >= 4.0;
    record(5, "oracle equivalence", ok,
           "L2(256) = " + fmt(e256) + " (tol 1e-4), ratio 256/512 = " + fmt(e256 / e512) +
               " (>= 4)");
}

// 6. Riccati residual on 100 random characteristics.
void criterion_riccati() {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> radial(0.0, 3.0);
    std::uniform_real_distribution<double> angular(0.0, 2.0 * kPi);
    std::uniform_real_distribution<double> tdist(0.05, 3.0);
    const double h = 1e-4;
    double worst = 0.0;
    int done = 0;
    while (done < 100) {
        const double r = radial(rng), a = angular(rng);
        const ComplexChar z0(r * std::cos(a), r * std::sin(a));
        const double t = tdist(rng);
        if (std::abs(z0 * std::sin(t) + 2.0 * std::cos(t)) < 2.0) continue;  // near pole
        ++done;
        const ComplexChar num =
            (riccati_solve(z0, t + h) - riccati_solve(z0, t - h)) / (2.0 * h);
        const ComplexChar z = riccati_solve(z0, t);
        worst = std::max(worst, std::abs(num + 0.5 * (z * z + 4.0)));
    }
    record(6, "Riccati residual", worst <= 1e-6,
           "max |dz/dt + (z^2+4)/2| = " + fmt(worst) + " at h = 1e-4 (tol 1e-6)");
}

// 7. Weak geodesic residuals at 20 non-defect times per fixture, plus the
// second-order h study. The sweep runs at h = 5e-4, where the residual sup
// over t sits a factor ~6 under the tolerance floor (at h = 1e-3 the margin
// is only ~1.5x).
void criterion_weak_residual() {
    const double h = 5e-4;
    const double tol = residual_tolerance(h);  // max(1e-5, 2 h^2)
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> tdist(0.0, 2.0 * kPi);

    double worst = 0.0;
    bool ok = true;
    const InitialDatum fixtures[3] = {datum_stat(256), datum_smooth(512), datum_pw(512)};
    for (const InitialDatum& d : fixtures) {
        int done = 0;
        while (done < 20) {
            const double t = tdist(rng);
            if (near_defect_time(d, t, 1e-3 + h)) continue;
            ++done;
            const ResidualReport rep = geodesic_residual(d, t, h);
            worst = std::max({worst, rep.max_r1(), rep.max_r2()});
        }
    }
    ok = worst <= tol;

    // Order study: halve h twice on the smooth and piecewise fixtures.
    double order_lo = 10.0, order_hi = 0.0;
    for (int which : {1, 2}) {
        const InitialDatum& d = fixtures[which];
        const double t = which == 1 ? 0.45 : 1.35;
        const double e1 = geodesic_residual(d, t, 1e-3).max_r1();
        const double e2 = geodesic_residual(d, t, 5e-4).max_r1();
        const double e3 = geodesic_residual(d, t, 2.5e-4).max_r1();
        const double o1 = std::log2(e1 / e2), o2 = std::log2(e2 / e3);
        order_lo = std::min({order_lo, o1, o2});
        order_hi = std::max({order_hi, o1, o2});
    }
    const bool order_ok = order_lo >= 1.6 && order_hi <= 2.4;
    record(7, "weak geodesic residual", ok && order_ok,
           "max weak residual = " + fmt(worst) + " (tol " + fmt(tol) +
               "), observed h-orders in [" + fmt(order_lo) + ", " + fmt(order_hi) + "]");
}

// 8. Temporal pi-periodicity of the weak solution. rho is defined almost
// everywhere; nodes that sit on a structured breakpoint image (where it
// genuinely jumps) are skipped for the rho comparison.
void criterion_periodicity() {
    const int n = 256;
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> tdist(0.0, kPi);
    double worst = 0.0;
    for (const InitialDatum& d : {datum_stat(n), datum_smooth(n), datum_pw(n)}) {
        for (int trial = 0; trial < 20; ++trial) {
            const double t = tdist(rng);
            const EulerianFields a = eulerian_fields(d, t);
            const EulerianFields b = eulerian_fields(d, t + kPi);
            std::vector<uint8_t> near_jump(static_cast<std::size_t>(n), 0);
            if (d.structured) {
                const StructuredFlow sf = structured_flow(*d.structured, t);
                for (double b_pt : d.structured->breakpoints) {
                    const double y = sf.phi_at(b_pt);
                    for (int j = 0; j < n; ++j) {
                        double dy = std::abs(d.grid().node(j) - y);
                        dy = std::min(dy, 1.0 - dy);
                        if (dy <= 1.5 / n) near_jump[static_cast<std::size_t>(j)] = 1;
                    }
                }
            }
            for (int j = 0; j < n; ++j) {
                worst = std::max(worst, std::abs(a.u[j] - b.u[j]));
                if (!a.masked[static_cast<std::size_t>(j)] &&
                    !b.masked[static_cast<std::size_t>(j)] &&
                    !near_jump[static_cast<std::size_t>(j)])
                    worst = std::max(worst, std::abs(a.rho[j] - b.rho[j]));
            }
        }
    }
    record(8, "temporal pi-periodicity", worst <= 1e-8,
           "max |field(t+pi) - field(t)| = " + fmt(worst) +
               " (tol 1e-8; rho compared away from its jump images)");
}

// 9. Operator identities.
void criterion_operator_identities() {
    PeriodicGrid g(64);
    std::mt19937_64 rng(5);
    double worst_inv = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        auto p = hstest::random_trig(rng, 16);
        GridFn f = mean_zero_project(hstest::sample(g, [&](double x) { return p(x); }));
        GridFn round = derivative(derivative(inverse_A(f)));
        for (int j = 0; j < g.n; ++j)
            worst_inv = std::max(worst_inv, std::abs(round[j] + f[j]));
    }

    double worst_fixed = 0.0;
    for (double c : {0.5, 2.0, -1.7}) {
        const ChristoffelValue cv = christoffel_diag(GridFn(g, 0.0), GridFn(g, c));
        for (int j = 0; j < g.n; ++j)
            worst_fixed = std::max(worst_fixed, std::abs(cv.first[j]));
    }

    double worst_polar = 0.0;
    {
        auto pu = hstest::random_trig(rng, 6);
        auto pr = hstest::random_trig(rng, 6);
        const double pu0 = pu(0.0);
        GridFn u = hstest::sample(g, [&](double x) { return pu(x) - pu0; });
        GridFn rho = hstest::sample(g, [&](double x) { return 1.0 + 0.2 * pr(x); });
        const ChristoffelValue diag = christoffel_diag(u, rho);
        const ChristoffelValue bil = christoffel_bilinear(u, rho, u, rho);
        worst_polar = std::max(hstest::max_abs_diff(diag.first, bil.first),
                               0.0);
        const ChristoffelValue ab = christoffel_bilinear(u, rho, u, rho);
        worst_polar = std::max(worst_polar, hstest::max_abs_diff(ab.second,
                               zip(derivative(u), rho, [](double a, double b) { return -a * b; })));
    }

    const bool ok = worst_inv <= 1e-8 && worst_fixed <= 1e-12 && worst_polar <= 1e-12;
    record(9, "operator identities", ok,
           "|dxdx A^{-1} + id| = " + fmt(worst_inv) + " (1e-8), |Gamma1(0,c)| = " +
               fmt(worst_fixed) + " (1e-12), polarization = " + fmt(worst_polar) +
               " (1e-12)");
}

// 10. Weak-solution audit over a sweep crossing the piecewise breakdown.
void criterion_audit() {
    const std::vector<double> times{0.0,  0.3, 0.55, kPi / 4.0 - 0.2, kPi / 4.0 + 0.2,
                                    1.5,  2.2, 2.9,  3.6,             5.1};
    bool ok = true;
    std::string detail;
    const char* names[3] = {"stat", "smooth", "pw"};
    const InitialDatum fixtures[3] = {datum_stat(256), datum_smooth(512), datum_pw(512)};
    for (int i = 0; i < 3; ++i) {
        const AuditReport rep = weak_solution_audit(fixtures[i], times);
        ok = ok && rep.pass();
        detail += std::string(names[i]) + "=" + (rep.pass() ? "pass" : "FAIL");
        if (i + 1 < 3) detail += ", ";
    }
    record(10, "weak-solution audit (a)-(d)", ok, detail);
}

}  // namespace

int main() {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    criterion_breakdown_formula();
    criterion_breakdown_crosscheck();
    criterion_conservation();
    criterion_defect_law();
    criterion_oracle_equivalence();
    criterion_riccati();
    criterion_weak_residual();
    criterion_periodicity();
    criterion_operator_identities();
    criterion_audit();
    const double secs =
        std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - t0).count() /
        1000.0;
    std::printf("%d/10 criteria passed in %.1f s\n", 10 - g_failures, secs);
    return g_failures;
}
