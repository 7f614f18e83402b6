#include "hs2/weak_flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "hs2/circle_calculus.hpp"

namespace hs2 {

namespace {
constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kSinZeroTol = 1e-12;
constexpr double kMonotoneTol = 1e-12;
}  // namespace

GridFn varrho_integral(const InitialDatum& d, double t, int steps) {
    if (steps < 32) throw std::invalid_argument("varrho_integral: steps must be >= 32");
    if (steps % 2 != 0) ++steps;
    const int n = d.n();
    GridFn acc(d.grid());
    if (t == 0.0) return acc;

    const double ds = t / steps;
    std::vector<double> px(static_cast<std::size_t>(n));
    for (int i = 0; i <= steps; ++i) {
        const double s = ds * i;
        const double cs = std::cos(s), sn = std::sin(s);
        double max_px = 0.0;
        for (int j = 0; j < n; ++j) {
            const double f = cs + 0.5 * d.ux[j] * sn;
            const double g = 0.5 * d.rho[j] * sn;
            px[static_cast<std::size_t>(j)] = f * f + g * g;
            max_px = std::max(max_px, px[static_cast<std::size_t>(j)]);
        }
        const double eps_flat = kFlatRel * max_px;
        const double w = (i == 0 || i == steps) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        for (int j = 0; j < n; ++j) {
            const double p = px[static_cast<std::size_t>(j)];
            if (p > eps_flat) acc[j] += w / p;
        }
    }
    const double scale = ds / 3.0;
    for (int j = 0; j < n; ++j) acc[j] *= scale * d.rho[j];
    return acc;
}

WeakFlowState weak_flow_state(const InitialDatum& d, double t, int steps) {
    WeakFlowState st;
    st.t = t;
    st.lag = flow_map(d, t);
    st.varrho = varrho_integral(d, t, steps);
    st.varrho_t = GridFn(d.grid());
    for (int j = 0; j < d.n(); ++j)
        st.varrho_t[j] =
            st.lag.flat[static_cast<std::size_t>(j)] ? 0.0 : d.rho[j] / st.lag.phi_x[j];
    return st;
}

GridFn pseudo_inverse(const GridFn& phi) {
    const int n = phi.n();
    if (std::abs(phi[0]) > kMonotoneTol)
        throw std::invalid_argument("pseudo_inverse: phi(0) != 0");
    for (int j = 0; j + 1 < n; ++j)
        if (phi[j + 1] < phi[j] - kMonotoneTol)
            throw std::invalid_argument("pseudo_inverse: input not nondecreasing");
    if (phi[n - 1] > 1.0 + kMonotoneTol)
        throw std::invalid_argument("pseudo_inverse: phi exceeds 1 before wrap");

    // Polyline nodes (x_j, phi_j) for j = 0..n-1 closed by (1, 1).
    auto phi_node = [&](int k) { return k == n ? 1.0 : phi[k]; };
    GridFn psi(phi.grid);
    int k = 0;  // first index with phi_node(k) >= y, advanced monotonically
    for (int j = 0; j < n; ++j) {
        const double y = phi.grid.node(j);
        while (k <= n && phi_node(k) < y) ++k;
        if (k == 0) {
            psi[j] = 0.0;
            continue;
        }
        const double y_lo = phi_node(k - 1), y_hi = phi_node(k);
        const double x_lo = phi.grid.node(k - 1);
        // y_lo < y <= y_hi with y_hi > y_lo (the while loop skipped flats).
        psi[j] = x_lo + (y - y_lo) / (y_hi - y_lo) * phi.grid.spacing();
    }
    return psi;
}

namespace {

// Piecewise-linear sample of a grid function (periodic wrap for the value
// at x = 1, with phi_t-style fields vanishing there handled by the caller).
double pl_eval(const GridFn& fn, double x, double wrap_value) {
    const int n = fn.n();
    double xn = x * n;
    int k = static_cast<int>(std::floor(xn));
    k = std::clamp(k, 0, n - 1);
    const double theta = xn - k;
    const double lo = fn[k];
    const double hi = (k + 1 == n) ? wrap_value : fn[k + 1];
    return lo + theta * (hi - lo);
}

EulerianFields eulerian_structured(const InitialDatum& d, double t) {
    const StructuredFlow sf = structured_flow(*d.structured, t);
    const int n = d.n();
    EulerianFields ef;
    ef.t = t;
    ef.u = GridFn(d.grid());
    ef.u_x = GridFn(d.grid());
    ef.rho = GridFn(d.grid());
    ef.masked.assign(static_cast<std::size_t>(n), 0);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    int masked = 0;
    for (int j = 0; j < n; ++j) {
        const double y = d.grid().node(j);
        int piece = 0;
        const double x = sf.psi_at(y, &piece);
        ef.u[j] = sf.phit_a[piece] + sf.phi_tx[piece] * (x - sf.a[piece]);
        if (sf.flat[static_cast<std::size_t>(piece)]) {
            ef.u_x[j] = nan;
            ef.rho[j] = nan;
            ef.masked[static_cast<std::size_t>(j)] = 1;
            ++masked;
        } else {
            ef.u_x[j] = sf.U[piece];
            ef.rho[j] = sf.R[piece];
        }
    }
    ef.unmasked_fraction = 1.0 - static_cast<double>(masked) / n;
    return ef;
}

// Cubic Lagrange through four knots (ys[i], fs[i]); exact at the knots.
double lagrange4(const double ys[4], const double fs[4], double y) {
    double acc = 0.0;
    for (int i = 0; i < 4; ++i) {
        double w = fs[i];
        for (int m = 0; m < 4; ++m)
            if (m != i) w *= (y - ys[m]) / (ys[i] - ys[m]);
        acc += w;
    }
    return acc;
}

EulerianFields eulerian_sampled(const InitialDatum& d, double t) {
    const LagrangianState st = flow_map(d, t);
    const GridFn psi = pseudo_inverse(st.phi);
    const int n = d.n();
    EulerianFields ef;
    ef.t = t;
    ef.u = GridFn(d.grid());
    ef.u_x = GridFn(d.grid());
    ef.rho = GridFn(d.grid());
    ef.masked.assign(static_cast<std::size_t>(n), 0);

    // Periodically unwrapped knot accessors of the parametric samples
    // y = phi(x_k): phi gains 1 per period, the fields repeat.
    auto phi_knot = [&](int m) {
        const int q = (m >= n) ? 1 : (m < 0 ? -1 : 0);
        return st.phi[m - q * n] + q;
    };
    auto wrap = [&](int m) { return ((m % n) + n) % n; };

    const double nan = std::numeric_limits<double>::quiet_NaN();
    int masked = 0;
    for (int j = 0; j < n; ++j) {
        const double x = psi[j];
        const int k = std::clamp(static_cast<int>(std::floor(x * n)), 0, n - 1);
        const int k1 = (k + 1) % n;
        const bool flat_panel = st.flat[static_cast<std::size_t>(k)] ||
                                st.flat[static_cast<std::size_t>(k1)];
        bool stencil_flat = flat_panel;
        for (int m = k - 1; m <= k + 2 && !stencil_flat; ++m)
            stencil_flat = st.flat[static_cast<std::size_t>(wrap(m))] != 0;

        if (stencil_flat) {
            // Near a flat region fall back to the polyline composition; the
            // derivative-level fields are masked there anyway.
            ef.u[j] = pl_eval(st.phi_t, x, st.phi_t[0]);
            if (flat_panel) {
                ef.u_x[j] = nan;
                ef.rho[j] = nan;
                ef.masked[static_cast<std::size_t>(j)] = 1;
                ++masked;
            } else {
                const double theta = x * n - k;
                ef.u_x[j] = st.U[k] + theta * (st.U.at_wrapped(k + 1) - st.U[k]);
                ef.rho[j] = st.R[k] + theta * (st.R.at_wrapped(k + 1) - st.R[k]);
            }
            continue;
        }

        // Smooth case: interpolate u = phi_t o phi^{-1} (and rho, u_x) in the
        // y variable through the four knots around the located panel. The
        // generalized inverse only routes to the panel; no inversion error
        // enters the composed values.
        const double y = d.grid().node(j);
        double ys[4], fu[4], fux[4], frho[4];
        for (int i = 0; i < 4; ++i) {
            const int m = k - 1 + i;
            ys[i] = phi_knot(m);
            fu[i] = st.phi_t[wrap(m)];
            fux[i] = st.U[wrap(m)];
            frho[i] = st.R[wrap(m)];
        }
        ef.u[j] = lagrange4(ys, fu, y);
        ef.u_x[j] = lagrange4(ys, fux, y);
        ef.rho[j] = lagrange4(ys, frho, y);
    }
    ef.unmasked_fraction = 1.0 - static_cast<double>(masked) / n;
    return ef;
}

}  // namespace

EulerianFields eulerian_fields(const InitialDatum& d, double t) {
    return d.structured ? eulerian_structured(d, t) : eulerian_sampled(d, t);
}

double measured_energy(const InitialDatum& d, double t) {
    const double c = std::cos(t), s = std::sin(t);
    const int n = d.n();
    double max_px = 0.0;
    std::vector<double> px(static_cast<std::size_t>(n)), kin(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        const double f = c + 0.5 * d.ux[j] * s;
        const double g = 0.5 * d.rho[j] * s;
        const double ft = -s + 0.5 * d.ux[j] * c;
        const double gt = 0.5 * d.rho[j] * c;
        px[static_cast<std::size_t>(j)] = f * f + g * g;
        kin[static_cast<std::size_t>(j)] = ft * ft + gt * gt;
        max_px = std::max(max_px, px[static_cast<std::size_t>(j)]);
    }
    const double eps_flat = kFlatRel * max_px;
    double acc = 0.0;
    for (int j = 0; j < n; ++j)
        if (px[static_cast<std::size_t>(j)] > eps_flat) acc += kin[static_cast<std::size_t>(j)];
    return 4.0 * acc / n;
}

EnergyReport energy_report(const InitialDatum& d, double t, double eps) {
    EnergyReport rep;
    rep.t = t;
    rep.measured_E = measured_energy(d, t);
    const double s = std::sin(t);
    if (std::abs(s) <= kSinZeroTol) {
        rep.defect_measure = 0.0;
        rep.predicted_E = 4.0;
    } else {
        rep.defect_measure = level_set_measure(d, -2.0 * std::cos(t) / s, eps);
        rep.predicted_E = 4.0 - 4.0 / (s * s) * rep.defect_measure;
    }
    rep.is_defect_time = rep.defect_measure > 0.0;
    return rep;
}

std::vector<double> defect_times(const InitialDatum& d) {
    std::vector<double> out;
    if (!d.structured) return out;
    const StructuredDatum& sd = *d.structured;
    for (int i = 0; i < sd.pieces(); ++i) {
        if (sd.rho[i] != 0.0) continue;
        // t with -2 cot t = p, i.e. t = pi/2 + arctan(p/2) in (0, pi).
        const double t = kPi / 2.0 + std::atan(0.5 * sd.ux[i]);
        bool dup = false;
        for (double v : out)
            if (std::abs(v - t) <= 1e-13) dup = true;
        if (!dup) out.push_back(t);
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool near_defect_time(const InitialDatum& d, double t, double radius) {
    for (double tau : defect_times(d)) {
        double delta = std::fmod(std::abs(t - tau), kPi);
        delta = std::min(delta, kPi - delta);
        if (delta <= radius) return true;
    }
    return false;
}

bool TangentReport::pass() const { return u0_ok && flat_ok && std::isfinite(integral); }

TangentReport tangent_membership(const GridFn& U, const GridFn& F, const GridFn& phi,
                                 const GridFn& varrho, double eps) {
    const int n = phi.n();
    TangentReport rep;
    rep.u0_value = U[0];
    rep.u0_ok = std::abs(U[0]) <= eps;

    // Panel slopes of phi; the closing panel wraps to phi(1) = phi(0) + 1.
    std::vector<double> slope(static_cast<std::size_t>(n));
    double max_slope = 0.0;
    for (int k = 0; k < n; ++k) {
        const double hi = (k + 1 == n) ? phi[0] + 1.0 : phi[k + 1];
        slope[static_cast<std::size_t>(k)] = (hi - phi[k]) * n;
        if (slope[static_cast<std::size_t>(k)] < -kMonotoneTol * n)
            throw std::invalid_argument("tangent_membership: phi not nondecreasing");
        max_slope = std::max(max_slope, slope[static_cast<std::size_t>(k)]);
    }
    const double flat_thresh = kFlatRel * max_slope;

    rep.flat_max_slope = 0.0;
    double integral = 0.0;
    for (int k = 0; k < n; ++k) {
        const double p = slope[static_cast<std::size_t>(k)];
        const double dU = (U.at_wrapped(k + 1) - U[k]) * n;
        if (p <= flat_thresh) {
            rep.flat_max_slope = std::max(rep.flat_max_slope, std::abs(dU));
            continue;
        }
        const double fbar = 0.5 * (F[k] + F.at_wrapped(k + 1));
        const double vbar = 0.5 * (varrho[k] + varrho.at_wrapped(k + 1));
        integral += (dU * dU / p + (fbar - vbar) * (fbar - vbar) * p) / n;
    }
    rep.flat_ok = rep.flat_max_slope <= eps;
    rep.integral = integral;
    rep.inner_product = 0.25 * integral;
    return rep;
}

}  // namespace hs2
