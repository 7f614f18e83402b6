#include "hs2/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>

#include "hs2/circle_calculus.hpp"
#include "hs2/fourier.hpp"

namespace hs2 {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kTwoPi = 2.0 * kPi;
using cplx = std::complex<double>;

void require_pinned(const GridFn& u, const char* who) {
    if (std::abs(u[0]) > 1e-9)
        throw std::invalid_argument(std::string(who) + ": u(0) != 0");
}

}  // namespace

ChristoffelValue christoffel_diag(const GridFn& u, const GridFn& rho) {
    require_pinned(u, "christoffel_diag");
    const GridFn ux = derivative(u);
    GridFn w = zip(ux, rho, [](double a, double b) { return a * a + b * b; });
    const double total = integrate(w);
    GridFn cum = cumulative_integral(w, CumulativeMethod::spectral);
    ChristoffelValue out;
    out.first = GridFn(u.grid);
    for (int j = 0; j < u.n(); ++j)
        out.first[j] = 0.5 * cum[j] - 0.5 * u.grid.node(j) * total;
    GridFn urho = zip(u, rho, [](double a, double b) { return a * b; });
    out.second = derivative(urho);
    for (double& v : out.second.values) v = -v;
    return out;
}

ChristoffelValue christoffel_bilinear(const GridFn& u, const GridFn& rho, const GridFn& v,
                                      const GridFn& sigma) {
    require_pinned(u, "christoffel_bilinear");
    require_pinned(v, "christoffel_bilinear");
    GridFn up = zip(u, v, [](double a, double b) { return a + b; });
    GridFn um = zip(u, v, [](double a, double b) { return a - b; });
    GridFn rp = zip(rho, sigma, [](double a, double b) { return a + b; });
    GridFn rm = zip(rho, sigma, [](double a, double b) { return a - b; });
    const ChristoffelValue dp = christoffel_diag(up, rp);
    const ChristoffelValue dm = christoffel_diag(um, rm);

    ChristoffelValue out;
    out.first = GridFn(u.grid);
    for (int j = 0; j < u.n(); ++j)
        out.first[j] = 0.25 * (dp.first[j] - dm.first[j]);
    const GridFn ux = derivative(u);
    const GridFn vx = derivative(v);
    out.second = GridFn(u.grid);
    for (int j = 0; j < u.n(); ++j)
        out.second[j] = -0.5 * (ux[j] * sigma[j] + vx[j] * rho[j]);
    return out;
}

namespace {

// ---------------------------------------------------------------------------
// Weak projections in Lagrangian coordinates.
//
// With y = phi(t, x) and e_k(y) = exp(-2 pi i k y):
//   <u, e_k>      = int phi_t e_k(phi) phi_x dx
//   <u u_x, e_k>  = int phi_t phi_tx e_k(phi) dx
//   <Gamma1, e_k> = int [H(phi)/2 - phi E/2] e_k(phi) phi_x dx,
//                   H(y) = int_0^y (u_x^2 + rho^2),  E = H(1)
//   <rho, e_k>    = int rho~ e_k(phi) dx
//   <u rho, e_k>  = int phi_t rho~ e_k(phi) dx
// For structured data every factor is piecewise linear in x, so each piece
// integrates in closed form; for sampled data the integrands are smooth and
// periodic and the rectangle sum is spectrally accurate.
// ---------------------------------------------------------------------------

struct Projections {
    std::vector<cplx> u_k, uux_k, gamma1_k, rho_k, urho_k;
};

// J0 = int_0^L exp(-i b s) ds, J1 = int_0^L s exp(-i b s) ds.
void piece_kernels(double b, double L, cplx& J0, cplx& J1) {
    const double bl = b * L;
    if (std::abs(bl) < 1e-6) {
        const cplx ibl(0.0, bl);
        J0 = L * (1.0 - ibl / 2.0 - bl * bl / 6.0 + ibl * bl * bl / 24.0);
        J1 = L * L * (0.5 - ibl / 3.0 - bl * bl / 8.0 + ibl * bl * bl / 30.0);
        return;
    }
    const cplx ib(0.0, b);
    const cplx eL = std::exp(cplx(0.0, -bl));
    J0 = (1.0 - eL) / ib;
    J1 = (J0 - L * eL) / ib;
}

Projections project_structured(const StructuredDatum& sd, double t, int modes) {
    const StructuredFlow sf = structured_flow(sd, t);
    const int m = sf.pieces();

    // Cumulative H o phi at breakpoints; q = (U^2 + R^2) phi_x per piece,
    // zero on flat pieces (the chi cutoff).
    std::vector<double> q(static_cast<std::size_t>(m), 0.0);
    std::vector<double> Ha(static_cast<std::size_t>(m) + 1, 0.0);
    for (int i = 0; i < m; ++i) {
        if (!sf.flat[static_cast<std::size_t>(i)])
            q[static_cast<std::size_t>(i)] =
                (sf.U[i] * sf.U[i] + sf.R[i] * sf.R[i]) * sf.phi_x[i];
        Ha[i + 1] = Ha[i] + q[static_cast<std::size_t>(i)] * (sf.a[i + 1] - sf.a[i]);
    }
    const double energy = Ha[m];

    Projections pr;
    pr.u_k.assign(modes, cplx(0));
    pr.uux_k.assign(modes, cplx(0));
    pr.gamma1_k.assign(modes, cplx(0));
    pr.rho_k.assign(modes, cplx(0));
    pr.urho_k.assign(modes, cplx(0));

    for (int k = 0; k < modes; ++k) {
        for (int i = 0; i < m; ++i) {
            const double L = sf.a[i + 1] - sf.a[i];
            const double p = sf.phi_x[i];
            const double w = sf.phi_tx[i];
            const double va = sf.phit_a[i];
            const cplx Ea = std::exp(cplx(0.0, -kTwoPi * k * sf.phi_a[i]));
            cplx J0, J1;
            piece_kernels(kTwoPi * k * p, L, J0, J1);
            const cplx lin = va * J0 + w * J1;  // int phi_t e_k(phi) over the piece
            pr.u_k[k] += Ea * p * lin;
            pr.uux_k[k] += Ea * w * lin;
            pr.gamma1_k[k] +=
                Ea * p *
                ((0.5 * Ha[i] - 0.5 * sf.phi_a[i] * energy) * J0 +
                 (0.5 * q[static_cast<std::size_t>(i)] - 0.5 * p * energy) * J1);
            pr.rho_k[k] += sd.rho[i] * Ea * J0;
            pr.urho_k[k] += sd.rho[i] * Ea * lin;
        }
    }
    return pr;
}

struct SampledFlowData {
    GridFn phi, phi_t, phi_x, phi_tx, H;
    std::vector<uint8_t> flat;
    double energy = 0.0;
};

// Spectrally integrated flow snapshot for the projection sums.
SampledFlowData sampled_flow_data(const InitialDatum& d, double t) {
    const double c = std::cos(t), s = std::sin(t);
    const int n = d.n();
    SampledFlowData fd;
    fd.phi_x = GridFn(d.grid());
    fd.phi_tx = GridFn(d.grid());
    GridFn q(d.grid());
    fd.flat.assign(static_cast<std::size_t>(n), 0);

    double max_px = 0.0;
    for (int j = 0; j < n; ++j) {
        const double f = c + 0.5 * d.ux[j] * s;
        const double g = 0.5 * d.rho[j] * s;
        const double ft = -s + 0.5 * d.ux[j] * c;
        const double gt = 0.5 * d.rho[j] * c;
        fd.phi_x[j] = f * f + g * g;
        fd.phi_tx[j] = 2.0 * (f * ft + g * gt);
        max_px = std::max(max_px, fd.phi_x[j]);
    }
    const double eps_flat = kFlatRel * max_px;
    for (int j = 0; j < n; ++j) {
        if (fd.phi_x[j] <= eps_flat) {
            fd.flat[static_cast<std::size_t>(j)] = 1;
            q[j] = 0.0;
        } else {
            const double U = fd.phi_tx[j] / fd.phi_x[j];
            const double R = d.rho[j] / fd.phi_x[j];
            q[j] = (U * U + R * R) * fd.phi_x[j];
        }
    }
    fd.phi = cumulative_integral(fd.phi_x, CumulativeMethod::spectral);
    fd.phi_t = cumulative_integral(fd.phi_tx, CumulativeMethod::spectral);
    fd.H = cumulative_integral(q, CumulativeMethod::spectral);
    fd.energy = integrate(q);
    return fd;
}

Projections project_sampled(const InitialDatum& d, double t, int modes) {
    const SampledFlowData fd = sampled_flow_data(d, t);
    const int n = d.n();
    Projections pr;
    pr.u_k.assign(modes, cplx(0));
    pr.uux_k.assign(modes, cplx(0));
    pr.gamma1_k.assign(modes, cplx(0));
    pr.rho_k.assign(modes, cplx(0));
    pr.urho_k.assign(modes, cplx(0));

    for (int k = 0; k < modes; ++k) {
        cplx su(0), suux(0), sg(0), sr(0), sur(0);
        for (int j = 0; j < n; ++j) {
            const cplx e = std::exp(cplx(0.0, -kTwoPi * k * fd.phi[j]));
            su += fd.phi_t[j] * fd.phi_x[j] * e;
            suux += fd.phi_t[j] * fd.phi_tx[j] * e;
            sg += (0.5 * fd.H[j] - 0.5 * fd.phi[j] * fd.energy) * fd.phi_x[j] * e;
            sr += d.rho[j] * e;
            sur += fd.phi_t[j] * d.rho[j] * e;
        }
        const double inv = 1.0 / n;
        pr.u_k[k] = su * inv;
        pr.uux_k[k] = suux * inv;
        pr.gamma1_k[k] = sg * inv;
        pr.rho_k[k] = sr * inv;
        pr.urho_k[k] = sur * inv;
    }
    return pr;
}

Projections project_fields(const InitialDatum& d, double t, int modes) {
    return d.structured ? project_structured(*d.structured, t, modes)
                        : project_sampled(d, t, modes);
}

// Pointwise Gamma1 on the y-grid, from the Eulerian samples (masked nodes
// contribute zero to the cumulative, matching the chi convention).
GridFn gamma1_pointwise_sampled(const EulerianFields& ef) {
    GridFn w(ef.u.grid);
    for (int j = 0; j < ef.u.n(); ++j)
        w[j] = ef.masked[static_cast<std::size_t>(j)]
                   ? 0.0
                   : ef.u_x[j] * ef.u_x[j] + ef.rho[j] * ef.rho[j];
    const double total = integrate(w);
    GridFn cum = cumulative_integral(w, CumulativeMethod::spectral);
    GridFn out(ef.u.grid);
    for (int j = 0; j < ef.u.n(); ++j)
        out[j] = 0.5 * cum[j] - 0.5 * ef.u.grid.node(j) * total;
    return out;
}

// Exact pointwise Gamma1 for structured data: H is piecewise linear in y
// with kinks at the breakpoint images.
GridFn gamma1_pointwise_structured(const StructuredDatum& sd, double t,
                                   const PeriodicGrid& grid) {
    const StructuredFlow sf = structured_flow(sd, t);
    const int m = sf.pieces();
    std::vector<double> q(static_cast<std::size_t>(m), 0.0);
    std::vector<double> Ha(static_cast<std::size_t>(m) + 1, 0.0);
    for (int i = 0; i < m; ++i) {
        if (!sf.flat[static_cast<std::size_t>(i)])
            q[static_cast<std::size_t>(i)] =
                (sf.U[i] * sf.U[i] + sf.R[i] * sf.R[i]) * sf.phi_x[i];
        Ha[i + 1] = Ha[i] + q[static_cast<std::size_t>(i)] * (sf.a[i + 1] - sf.a[i]);
    }
    const double energy = Ha[m];
    GridFn out(grid);
    for (int j = 0; j < grid.n; ++j) {
        const double y = grid.node(j);
        int piece = 0;
        const double x = sf.psi_at(y, &piece);
        const double H = Ha[piece] + q[static_cast<std::size_t>(piece)] * (x - sf.a[piece]);
        out[j] = 0.5 * H - 0.5 * y * energy;
    }
    return out;
}

// Nodes swept by a moving field discontinuity during [t-h, t+h]: for each
// breakpoint whose (u_x, rho) pieces differ across it, mask the nodes in the
// padded hull of its images at t-h, t, t+h.
void mask_kink_windows(const InitialDatum& d, double t, double h,
                       std::vector<uint8_t>& masked) {
    if (!d.structured) return;
    const StructuredDatum& sd = *d.structured;
    const int n = static_cast<int>(masked.size());
    const StructuredFlow fm = structured_flow(sd, t - h);
    const StructuredFlow f0 = structured_flow(sd, t);
    const StructuredFlow fp = structured_flow(sd, t + h);
    const int m = sd.pieces();
    for (int i = 0; i < m; ++i) {
        const int prev = (i + m - 1) % m;
        if (sd.ux[i] == sd.ux[prev] && sd.rho[i] == sd.rho[prev]) continue;
        const double b = sd.breakpoints[i];  // includes the wrap breakpoint 0
        double lo = std::min({fm.phi_at(b), f0.phi_at(b), fp.phi_at(b)});
        double hi = std::max({fm.phi_at(b), f0.phi_at(b), fp.phi_at(b)});
        lo -= 1.5 / n;
        hi += 1.5 / n;
        for (int j = 0; j < n; ++j) {
            const double y = static_cast<double>(j) / n;
            const bool inside = (y >= lo && y <= hi) || (y - 1.0 >= lo && y - 1.0 <= hi) ||
                                (y + 1.0 >= lo && y + 1.0 <= hi);
            if (inside) masked[static_cast<std::size_t>(j)] = 1;
        }
    }
}

}  // namespace

double ResidualReport::max_r1() const {
    double m = 0.0;
    for (double v : r1_weak) m = std::max(m, v);
    return m;
}
double ResidualReport::max_r2() const {
    double m = 0.0;
    for (double v : r2_weak) m = std::max(m, v);
    return m;
}

ResidualReport geodesic_residual(const InitialDatum& d, double t, double h, int modes) {
    if (h < 1e-5 || h > 1e-3)
        throw std::invalid_argument("geodesic_residual: h must lie in [1e-5, 1e-3]");
    if (near_defect_time(d, t, 1e-3 + h)) {
        std::ostringstream os;
        os << "geodesic_residual: t = " << t
           << " is within the defect-time exclusion window; the classical residual is "
              "undefined there";
        throw std::invalid_argument(os.str());
    }

    ResidualReport rep;
    rep.t = t;
    rep.h = h;
    rep.r1_weak.assign(static_cast<std::size_t>(modes), 0.0);
    rep.r2_weak.assign(static_cast<std::size_t>(modes), 0.0);

    const Projections pp = project_fields(d, t + h, modes);
    const Projections pm = project_fields(d, t - h, modes);
    const Projections p0 = project_fields(d, t, modes);
    for (int k = 0; k < modes; ++k) {
        const cplx ut = (pp.u_k[k] - pm.u_k[k]) / (2.0 * h);
        rep.r1_weak[static_cast<std::size_t>(k)] =
            std::abs(ut + p0.uux_k[k] - p0.gamma1_k[k]);
        const cplx rhot = (pp.rho_k[k] - pm.rho_k[k]) / (2.0 * h);
        const cplx transport = cplx(0.0, kTwoPi * k) * p0.urho_k[k];
        rep.r2_weak[static_cast<std::size_t>(k)] = std::abs(rhot + transport);
    }

    // Pointwise residual of the velocity equation on unmasked nodes.
    const EulerianFields em = eulerian_fields(d, t - h);
    const EulerianFields e0 = eulerian_fields(d, t);
    const EulerianFields ep = eulerian_fields(d, t + h);
    const int n = d.n();
    std::vector<uint8_t> masked(static_cast<std::size_t>(n), 0);
    for (int j = 0; j < n; ++j)
        masked[static_cast<std::size_t>(j)] = em.masked[static_cast<std::size_t>(j)] |
                                              e0.masked[static_cast<std::size_t>(j)] |
                                              ep.masked[static_cast<std::size_t>(j)];
    mask_kink_windows(d, t, h, masked);

    const GridFn gamma1 = d.structured
                              ? gamma1_pointwise_structured(*d.structured, t, d.grid())
                              : gamma1_pointwise_sampled(e0);
    double linf = 0.0;
    int nmask = 0;
    for (int j = 0; j < n; ++j) {
        if (masked[static_cast<std::size_t>(j)]) {
            ++nmask;
            continue;
        }
        const double ut = (ep.u[j] - em.u[j]) / (2.0 * h);
        const double r1 = ut + e0.u[j] * e0.u_x[j] - gamma1[j];
        linf = std::max(linf, std::abs(r1));
    }
    rep.r1_linf_unmasked = linf;
    rep.mask_fraction = static_cast<double>(nmask) / n;
    return rep;
}

AuditReport weak_solution_audit(const InitialDatum& d, const std::vector<double>& times,
                                double h, int steps) {
    AuditReport rep;
    const int n = d.n();
    const double tol_weak = residual_tolerance(h);

    // (b) initial conditions.
    const EulerianFields e0 = eulerian_fields(d, 0.0);
    double u_err = 0.0;
    int rho_bad = 0;
    for (int j = 0; j < n; ++j) {
        u_err = std::max(u_err, std::abs(e0.u[j] - d.u[j]));
        const bool ok = !e0.masked[static_cast<std::size_t>(j)] &&
                        std::abs(e0.rho[j] - d.rho[j]) <= 1e-9;
        if (!ok) ++rho_bad;
    }
    rep.b_u_err = u_err;
    rep.b_rho_err_fraction = static_cast<double>(rho_bad) / n;
    rep.b_pass = u_err <= 1e-9 && rep.b_rho_err_fraction <= 1.0 / n;

    bool a_ok = true, d_ok = true;
    double sup_ux = 0.0, sup_rho = 0.0;
    for (double t : times) {
        AuditRow row;
        row.t = t;
        const EulerianFields ef = eulerian_fields(d, t);
        GridFn ux2(d.grid()), rho2(d.grid());
        std::vector<uint8_t> keep(static_cast<std::size_t>(n), 0);
        for (int j = 0; j < n; ++j) {
            if (ef.masked[static_cast<std::size_t>(j)]) continue;
            keep[static_cast<std::size_t>(j)] = 1;
            ux2[j] = ef.u_x[j] * ef.u_x[j];
            rho2[j] = ef.rho[j] * ef.rho[j];
        }
        row.ux_l2_sq = integrate_where(ux2, keep);
        row.rho_l2_sq = integrate_where(rho2, keep);
        row.h1_seminorm_sq = row.ux_l2_sq;
        if (!std::isfinite(row.h1_seminorm_sq)) a_ok = false;
        sup_ux = std::max(sup_ux, row.ux_l2_sq);
        sup_rho = std::max(sup_rho, row.rho_l2_sq);

        row.excluded_defect = near_defect_time(d, t, 1e-3 + h) || t - h < 0.0;
        if (!row.excluded_defect) {
            const ResidualReport rr = geodesic_residual(d, t, h);
            row.r1_weak_max = rr.max_r1();
            row.r2_weak_max = rr.max_r2();
            if (row.r1_weak_max > tol_weak || row.r2_weak_max > tol_weak) d_ok = false;
        }

        const WeakFlowState ws = weak_flow_state(d, t, steps);
        const TangentReport tr = tangent_membership(ws.lag.phi_t, ws.varrho_t, ws.lag.phi,
                                                    GridFn(d.grid(), 0.0), 1e-8);
        row.tangent_pass = tr.pass();
        row.tangent_inner = tr.inner_product;
        rep.rows.push_back(row);
    }
    rep.a_pass = a_ok;
    rep.c_sup_ux_l2_sq = sup_ux;
    rep.c_sup_rho_l2_sq = sup_rho;
    rep.c_pass = std::isfinite(sup_ux) && std::isfinite(sup_rho);
    rep.d_pass = d_ok;
    return rep;
}

namespace {

struct OracleState {
    std::vector<double> u, rho;
};

OracleState axpy(const OracleState& y, double a, const OracleState& k) {
    OracleState out = y;
    for (std::size_t j = 0; j < out.u.size(); ++j) {
        out.u[j] += a * k.u[j];
        out.rho[j] += a * k.rho[j];
    }
    return out;
}

}  // namespace

OracleResult oracle_solve(const InitialDatum& d, double t_end, int n, double dt) {
    const double tstar = breakdown_time(d);
    if (!(t_end < tstar)) {
        std::ostringstream os;
        os << "oracle_solve: t_end = " << t_end
           << " is not before the breakdown time T* = " << tstar;
        throw std::invalid_argument(os.str());
    }
    if (!(dt > 0.0) || dt > 0.5 / n)
        throw std::invalid_argument("oracle_solve: dt must satisfy 0 < dt <= 0.5/n");

    PeriodicGrid grid(n);
    OracleState y;
    y.u = (n == d.n()) ? d.u.values : fourier::resample(d.u.values, n);
    y.rho = (n == d.n()) ? d.rho.values : fourier::resample(d.rho.values, n);

    auto rhs = [&](const OracleState& s) {
        GridFn u(grid, s.u), rho(grid, s.rho);
        const ChristoffelValue cv = christoffel_diag(u, rho);
        const GridFn ux = derivative(u);
        OracleState k;
        k.u.resize(static_cast<std::size_t>(n));
        k.rho.resize(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            k.u[static_cast<std::size_t>(j)] = -s.u[static_cast<std::size_t>(j)] * ux[j] +
                                               cv.first[j];
            k.rho[static_cast<std::size_t>(j)] = cv.second[j];
        }
        return k;
    };

    auto energy_of = [&](const OracleState& s) {
        GridFn u(grid, s.u), rho(grid, s.rho);
        return l2_norm_sq(derivative(u)) + l2_norm_sq(rho);
    };

    const double e0 = energy_of(y);
    OracleResult res;
    res.energy_drift_max = 0.0;
    double t = 0.0;
    while (t < t_end - 1e-15) {
        const double step = std::min(dt, t_end - t);
        const OracleState k1 = rhs(y);
        const OracleState k2 = rhs(axpy(y, 0.5 * step, k1));
        const OracleState k3 = rhs(axpy(y, 0.5 * step, k2));
        const OracleState k4 = rhs(axpy(y, step, k3));
        for (int j = 0; j < n; ++j) {
            const std::size_t sj = static_cast<std::size_t>(j);
            y.u[sj] += step / 6.0 * (k1.u[sj] + 2.0 * k2.u[sj] + 2.0 * k3.u[sj] + k4.u[sj]);
            y.rho[sj] +=
                step / 6.0 * (k1.rho[sj] + 2.0 * k2.rho[sj] + 2.0 * k3.rho[sj] + k4.rho[sj]);
        }
        const double pin = y.u[0];
        for (double& v : y.u) v -= pin;
        t += step;
        ++res.steps;

        GridFn u(grid, y.u);
        const GridFn ux = derivative(u);
        double uxmax = 0.0;
        for (double v : ux.values) uxmax = std::max(uxmax, std::abs(v));
        if (uxmax > 1e3) {
            std::ostringstream os;
            os << "oracle_solve: |u_x|_inf = " << uxmax << " at t = " << t
               << " (approaching blow-up)";
            throw OracleGuard(os.str());
        }
        const double drift = std::abs(energy_of(y) - e0);
        res.energy_drift_max = std::max(res.energy_drift_max, drift);
        if (drift > 1e-3) {
            std::ostringstream os;
            os << "oracle_solve: energy drift " << drift << " at t = " << t;
            throw OracleGuard(os.str());
        }
    }

    res.fields.t = t_end;
    res.fields.u = GridFn(grid, y.u);
    res.fields.u_x = derivative(res.fields.u);
    res.fields.rho = GridFn(grid, y.rho);
    res.fields.masked.assign(static_cast<std::size_t>(n), 0);
    res.fields.unmasked_fraction = 1.0;
    return res;
}

}  // namespace hs2
