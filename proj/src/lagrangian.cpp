#include "hs2/lagrangian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hs2/circle_calculus.hpp"

namespace hs2 {

namespace {
constexpr double kPi = 3.141592653589793238462643383279;

std::string format_blowup(double t, ComplexChar z0) {
    std::ostringstream os;
    os << "riccati_solve: characteristic blown up at t = " << t << " for z0 = ("
       << z0.real() << ", " << z0.imag() << ")";
    return os.str();
}
}  // namespace

RiccatiBlowup::RiccatiBlowup(double t_, ComplexChar z0_)
    : std::runtime_error(format_blowup(t_, z0_)), t(t_), z0(z0_) {}

ComplexChar riccati_solve(ComplexChar z0, double t) {
    const double c = std::cos(t), s = std::sin(t);
    const ComplexChar denom = z0 * s + 2.0 * c;
    if (std::abs(denom) <= kRiccatiDenomTol) throw RiccatiBlowup(t, z0);
    return (2.0 * z0 * c - 4.0 * s) / denom;
}

FG fg(const InitialDatum& d, double t) {
    const double c = std::cos(t), s = std::sin(t);
    FG out{GridFn(d.grid()), GridFn(d.grid())};
    for (int j = 0; j < d.n(); ++j) {
        out.f[j] = c + 0.5 * d.ux[j] * s;
        out.g[j] = 0.5 * d.rho[j] * s;
    }
    return out;
}

LagrangianState flow_map(const InitialDatum& d, double t) {
    const double c = std::cos(t), s = std::sin(t);
    const int n = d.n();
    LagrangianState st;
    st.t = t;
    st.f = GridFn(d.grid());
    st.g = GridFn(d.grid());
    st.phi_x = GridFn(d.grid());
    st.phi_tx = GridFn(d.grid());
    st.U = GridFn(d.grid());
    st.R = GridFn(d.grid());
    st.flat.assign(static_cast<std::size_t>(n), 0);

    double max_px = 0.0;
    for (int j = 0; j < n; ++j) {
        const double f = c + 0.5 * d.ux[j] * s;
        const double g = 0.5 * d.rho[j] * s;
        const double ft = -s + 0.5 * d.ux[j] * c;
        const double gt = 0.5 * d.rho[j] * c;
        st.f[j] = f;
        st.g[j] = g;
        st.phi_x[j] = f * f + g * g;
        st.phi_tx[j] = 2.0 * (f * ft + g * gt);
        max_px = std::max(max_px, st.phi_x[j]);
    }
    st.eps_flat_abs = kFlatRel * max_px;

    if (d.structured) {
        // Exact cumulative integrals of the piecewise-constant integrands.
        const StructuredFlow sf = structured_flow(*d.structured, t);
        st.phi = map_nodes(d.grid(), [&](double x) { return sf.phi_at(x); });
        st.phi_t = map_nodes(d.grid(), [&](double x) { return sf.phit_at(x); });
    } else {
        // Sampled data are assumed smooth; the spectral cumulative keeps the
        // initial condition u(0,.) = u~ at collocation accuracy, which the
        // subinterval trapezoid sums (O(h^2) bias) cannot.
        st.phi = cumulative_integral(st.phi_x, CumulativeMethod::spectral);
        st.phi_t = cumulative_integral(st.phi_tx, CumulativeMethod::spectral);
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (int j = 0; j < n; ++j) {
        if (st.phi_x[j] <= st.eps_flat_abs) {
            st.flat[static_cast<std::size_t>(j)] = 1;
            st.U[j] = nan;
            st.R[j] = nan;
        } else {
            st.U[j] = st.phi_tx[j] / st.phi_x[j];
            st.R[j] = d.rho[j] / st.phi_x[j];
        }
    }
    return st;
}

std::vector<Interval> breakdown_set(const InitialDatum& d, double t, double eps) {
    const double s = std::sin(t);
    if (std::abs(s) <= 1e-12) return {};
    const double c = -2.0 * std::cos(t) / s;

    std::vector<Interval> out;
    if (d.structured) {
        const StructuredDatum& sd = *d.structured;
        for (int i = 0; i < sd.pieces(); ++i) {
            if (sd.rho[i] != 0.0 || std::abs(sd.ux[i] - c) > kLevelTol) continue;
            const double a = sd.breakpoints[i], b = sd.breakpoints[i + 1];
            if (!out.empty() && out.back().hi == a)
                out.back().hi = b;
            else
                out.push_back({a, b});
        }
        return out;
    }
    const int n = d.n();
    int j = 0;
    while (j < n) {
        const bool hit = std::abs(d.rho[j]) <= eps && std::abs(d.ux[j] - c) <= eps;
        if (!hit) {
            ++j;
            continue;
        }
        int k = j;
        while (k + 1 < n && std::abs(d.rho[k + 1]) <= eps && std::abs(d.ux[k + 1] - c) <= eps)
            ++k;
        out.push_back({d.grid().node(j), d.grid().node(k)});
        j = k + 1;
    }
    // Unwrap a run crossing x = 0.
    if (out.size() >= 2 && out.front().lo == 0.0 && out.back().hi == d.grid().node(n - 1)) {
        Interval merged{out.back().lo - 1.0, out.front().hi};
        out.erase(out.end() - 1);
        out.erase(out.begin());
        out.insert(out.begin(), merged);
    }
    return out;
}

namespace {

// min over the zero set of rho of f(t, .) = cos t + (ux/2) sin t; crosses
// zero transversally at the first flattening time.
double min_f_on_zero_set(const StructuredDatum& sd, double t) {
    const double c = std::cos(t), s = std::sin(t);
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < sd.pieces(); ++i)
        if (sd.rho[i] == 0.0) m = std::min(m, c + 0.5 * sd.ux[i] * s);
    return m;
}

double min_phi_x(const InitialDatum& d, double t) {
    const double c = std::cos(t), s = std::sin(t);
    double m = std::numeric_limits<double>::infinity();
    for (int j = 0; j < d.n(); ++j) {
        const double f = c + 0.5 * d.ux[j] * s;
        const double g = 0.5 * d.rho[j] * s;
        m = std::min(m, f * f + g * g);
    }
    return m;
}

}  // namespace

double first_flat_time(const InitialDatum& d) {
    constexpr int kScan = 4096;
    const double inf = std::numeric_limits<double>::infinity();

    if (d.structured) {
        const StructuredDatum& sd = *d.structured;
        bool has_zero = false;
        for (double r : sd.rho)
            if (r == 0.0) has_zero = true;
        if (!has_zero) return inf;
        double lo = 0.0;
        for (int k = 1; k <= kScan; ++k) {
            const double t = kPi * k / kScan;
            if (min_f_on_zero_set(sd, t) <= 0.0) {
                double hi = t;
                for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (min_f_on_zero_set(sd, mid) <= 0.0 ? hi : lo) = mid;
                }
                return 0.5 * (lo + hi);
            }
            lo = t;
        }
        return inf;
    }

    constexpr double kFlatThresh = 1e-10;
    double lo = 0.0;
    for (int k = 1; k <= kScan; ++k) {
        const double t = kPi * k / kScan;
        if (min_phi_x(d, t) <= kFlatThresh) {
            double hi = t;
            for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
                const double mid = 0.5 * (lo + hi);
                (min_phi_x(d, mid) <= kFlatThresh ? hi : lo) = mid;
            }
            return 0.5 * (lo + hi);
        }
        lo = t;
    }
    return inf;
}

double StructuredFlow::phi_at(double x) const {
    const int m = pieces();
    int i = 0;
    {
        int lo = 0, hi = m - 1;
        while (lo < hi) {
            int mid = (lo + hi + 1) / 2;
            if (a[mid] <= x)
                lo = mid;
            else
                hi = mid - 1;
        }
        i = lo;
    }
    if (x >= 1.0) return phi_a[m] + (x - 1.0);  // phi(1) = 1, slope wraps
    return phi_a[i] + phi_x[i] * (x - a[i]);
}

double StructuredFlow::phit_at(double x) const {
    const int m = pieces();
    int lo = 0, hi = m - 1;
    while (lo < hi) {
        int mid = (lo + hi + 1) / 2;
        if (a[mid] <= x)
            lo = mid;
        else
            hi = mid - 1;
    }
    return phit_a[lo] + phi_tx[lo] * (x - a[lo]);
}

double StructuredFlow::psi_at(double y, int* piece_out) const {
    const int m = pieces();
    // First piece whose closed image [phi_a[i], phi_a[i+1]] reaches y.
    int i = 0;
    while (i < m - 1 && phi_a[i + 1] < y) ++i;
    double x;
    if (y <= phi_a[i]) {
        x = a[i];  // left endpoint; covers flat pieces whose image is a point
    } else {
        x = a[i] + (y - phi_a[i]) / phi_x[i];
        x = std::min(x, a[i + 1]);
        // Right-continuous piece assignment when x lands on a breakpoint.
        while (i + 1 < m && x >= a[i + 1]) ++i;
    }
    if (piece_out) *piece_out = i;
    return x;
}

StructuredFlow structured_flow(const StructuredDatum& sd, double t) {
    const double c = std::cos(t), s = std::sin(t);
    const int m = sd.pieces();
    StructuredFlow sf;
    sf.t = t;
    sf.a = sd.breakpoints;
    sf.f.resize(m);
    sf.g.resize(m);
    sf.ft.resize(m);
    sf.gt.resize(m);
    sf.phi_x.resize(m);
    sf.phi_tx.resize(m);
    sf.U.resize(m);
    sf.R.resize(m);
    sf.flat.assign(static_cast<std::size_t>(m), 0);
    sf.phi_a.assign(static_cast<std::size_t>(m) + 1, 0.0);
    sf.phit_a.assign(static_cast<std::size_t>(m) + 1, 0.0);

    double max_px = 0.0;
    for (int i = 0; i < m; ++i) {
        sf.f[i] = c + 0.5 * sd.ux[i] * s;
        sf.g[i] = 0.5 * sd.rho[i] * s;
        sf.ft[i] = -s + 0.5 * sd.ux[i] * c;
        sf.gt[i] = 0.5 * sd.rho[i] * c;
        sf.phi_x[i] = sf.f[i] * sf.f[i] + sf.g[i] * sf.g[i];
        sf.phi_tx[i] = 2.0 * (sf.f[i] * sf.ft[i] + sf.g[i] * sf.gt[i]);
        max_px = std::max(max_px, sf.phi_x[i]);
    }
    sf.eps_flat_abs = kFlatRel * max_px;

    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (int i = 0; i < m; ++i) {
        sf.phi_a[i + 1] = sf.phi_a[i] + sf.phi_x[i] * sd.piece_length(i);
        sf.phit_a[i + 1] = sf.phit_a[i] + sf.phi_tx[i] * sd.piece_length(i);
        if (sf.phi_x[i] <= sf.eps_flat_abs) {
            sf.flat[static_cast<std::size_t>(i)] = 1;
            sf.U[i] = nan;
            sf.R[i] = nan;
        } else {
            sf.U[i] = sf.phi_tx[i] / sf.phi_x[i];
            sf.R[i] = sd.rho[i] / sf.phi_x[i];
        }
    }
    return sf;
}

}  // namespace hs2
