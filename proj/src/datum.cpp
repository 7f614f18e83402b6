#include "hs2/datum.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "hs2/circle_calculus.hpp"
#include "hs2/fourier.hpp"

namespace hs2 {

namespace {
constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kStructTol = 1e-12;
constexpr double kPointTol = 1e-10;
}  // namespace

int StructuredDatum::piece_index(double x) const {
    // Right-continuous: x on a breakpoint belongs to the piece starting there.
    x -= std::floor(x);
    int lo = 0, hi = pieces() - 1;
    while (lo < hi) {
        int mid = (lo + hi + 1) / 2;
        if (breakpoints[mid] <= x)
            lo = mid;
        else
            hi = mid - 1;
    }
    return lo;
}

double StructuredDatum::u_at(double x) const {
    double acc = 0.0;
    for (int i = 0; i < pieces(); ++i) {
        const double a = breakpoints[i], b = breakpoints[i + 1];
        if (x <= a) break;
        acc += ux[i] * (std::min(x, b) - a);
    }
    return acc;
}

void StructuredDatum::validate() const {
    const int m = pieces();
    if (m < 1 || static_cast<int>(rho.size()) != m ||
        static_cast<int>(breakpoints.size()) != m + 1)
        throw std::invalid_argument("StructuredDatum: inconsistent piece counts");
    if (breakpoints.front() != 0.0 || breakpoints.back() != 1.0)
        throw std::invalid_argument("StructuredDatum: breakpoints must start at 0 and end at 1");
    for (int i = 0; i < m; ++i)
        if (!(breakpoints[i] < breakpoints[i + 1]))
            throw std::invalid_argument("StructuredDatum: breakpoints must be increasing");
    double mean_ux = 0.0, energy = 0.0;
    for (int i = 0; i < m; ++i) {
        const double len = piece_length(i);
        mean_ux += ux[i] * len;
        energy += (ux[i] * ux[i] + rho[i] * rho[i]) * len;
    }
    if (std::abs(mean_ux) > kStructTol)
        throw std::invalid_argument("StructuredDatum: sum ux*length != 0 (u not periodic)");
    if (std::abs(energy - 4.0) > kStructTol)
        throw std::invalid_argument("StructuredDatum: gauge energy != 4");
}

namespace {

void validate_datum(const InitialDatum& d) {
    check_finite(d.u, "datum.u");
    check_finite(d.rho, "datum.rho");
    if (std::abs(d.u[0]) > kPointTol)
        throw std::invalid_argument("datum: u(0) != 0");
    if (std::abs(integrate(d.ux)) > kMeanZeroTol)
        throw std::invalid_argument("datum: u_x has nonzero mean (u not periodic)");
    if (std::abs(d.energy - 4.0) > kGaugeTol)
        throw std::invalid_argument("datum: gauge energy |u_x|^2 + |rho|^2 != 4, got " +
                                    std::to_string(d.energy));
}

}  // namespace

InitialDatum datum_from_samples(GridFn u, GridFn rho) {
    if (!(u.grid == rho.grid))
        throw std::invalid_argument("datum_from_samples: grid mismatch");
    InitialDatum d;
    d.ux = derivative(u);
    d.energy = l2_norm_sq(d.ux) + l2_norm_sq(rho);
    d.u = std::move(u);
    d.rho = std::move(rho);
    validate_datum(d);
    return d;
}

InitialDatum datum_from_structured(StructuredDatum sd, int n) {
    sd.validate();
    PeriodicGrid grid(n);
    InitialDatum d;
    d.u = GridFn(grid);
    d.rho = GridFn(grid);
    d.ux = GridFn(grid);
    for (int j = 0; j < n; ++j) {
        const double x = grid.node(j);
        const int i = sd.piece_index(x);
        d.u[j] = sd.u_at(x);
        d.ux[j] = sd.ux[i];
        d.rho[j] = sd.rho[i];
    }
    // The exact piecewise energy; the node sums agree with it whenever the
    // breakpoints sit on grid nodes.
    d.energy = 0.0;
    for (int i = 0; i < sd.pieces(); ++i)
        d.energy += (sd.ux[i] * sd.ux[i] + sd.rho[i] * sd.rho[i]) * sd.piece_length(i);
    d.structured = std::move(sd);
    if (std::abs(d.u[0]) > kPointTol)
        throw std::invalid_argument("datum: u(0) != 0");
    return d;
}

std::pair<InitialDatum, double> normalize(const GridFn& u, const GridFn& rho) {
    if (std::abs(u[0]) > kPointTol)
        throw std::invalid_argument("normalize: u(0) != 0");
    GridFn ux = derivative(u);
    const double e0 = l2_norm_sq(ux) + l2_norm_sq(rho);
    if (e0 <= 1e-14)
        throw std::invalid_argument("normalize: zero datum has no normalized representative");
    const double alpha = 2.0 / std::sqrt(e0);
    GridFn su = u, srho = rho;
    for (double& v : su.values) v *= alpha;
    for (double& v : srho.values) v *= alpha;
    return {datum_from_samples(std::move(su), std::move(srho)), alpha};
}

namespace {

std::vector<Interval> merge_wrap(std::vector<Interval> runs, double last_hi) {
    // Merge a run reaching the wrap point with one starting at 0 into an
    // unwrapped interval with lo < 0.
    if (runs.size() >= 2 && runs.front().lo == 0.0 && runs.back().hi == last_hi) {
        Interval merged{runs.back().lo - 1.0, runs.front().hi};
        runs.erase(runs.end() - 1);
        runs.erase(runs.begin());
        runs.insert(runs.begin(), merged);
    }
    return runs;
}

// Maximal node runs where pred holds, as [x_first, x_last] intervals with
// the wrap-around run unwrapped below 0.
template <typename Pred>
std::vector<Interval> node_runs(const PeriodicGrid& g, Pred&& pred) {
    std::vector<Interval> out;
    const int n = g.n;
    int j = 0;
    while (j < n) {
        if (!pred(j)) {
            ++j;
            continue;
        }
        int k = j;
        while (k + 1 < n && pred(k + 1)) ++k;
        out.push_back({g.node(j), g.node(k)});
        j = k + 1;
    }
    return merge_wrap(std::move(out), g.node(n - 1));
}

}  // namespace

std::vector<Interval> zero_set(const InitialDatum& d, double eps) {
    if (d.structured) {
        std::vector<Interval> out;
        const StructuredDatum& sd = *d.structured;
        for (int i = 0; i < sd.pieces(); ++i) {
            if (sd.rho[i] != 0.0) continue;
            const double a = sd.breakpoints[i], b = sd.breakpoints[i + 1];
            if (!out.empty() && out.back().hi == a)
                out.back().hi = b;
            else
                out.push_back({a, b});
        }
        return merge_wrap(std::move(out), 1.0);
    }
    return node_runs(d.grid(), [&](int j) { return std::abs(d.rho[j]) <= eps; });
}

double level_set_measure(const InitialDatum& d, double c, double eps) {
    if (d.structured) {
        const StructuredDatum& sd = *d.structured;
        double total = 0.0;
        for (int i = 0; i < sd.pieces(); ++i)
            if (sd.rho[i] == 0.0 && std::abs(sd.ux[i] - c) <= kLevelTol)
                total += sd.piece_length(i);
        return total;
    }
    const int n = d.n();
    int count = 0;
    for (int j = 0; j < n; ++j)
        if (std::abs(d.ux[j] - c) <= eps && std::abs(d.rho[j]) <= eps) ++count;
    return static_cast<double>(count) / n;
}

double breakdown_time(const InitialDatum& d) {
    double m = std::numeric_limits<double>::infinity();
    bool any = false;
    if (d.structured) {
        const StructuredDatum& sd = *d.structured;
        for (int i = 0; i < sd.pieces(); ++i)
            if (sd.rho[i] == 0.0) {
                any = true;
                m = std::min(m, sd.ux[i]);
            }
    } else {
        for (int j = 0; j < d.n(); ++j)
            if (std::abs(d.rho[j]) <= kZeroBandEps) {
                any = true;
                m = std::min(m, d.ux[j]);
            }
    }
    if (!any) return std::numeric_limits<double>::infinity();
    return kPi / 2.0 + std::atan(0.5 * m);
}

InitialDatum datum_stat(int n) {
    return datum_from_structured(StructuredDatum{{0.0, 1.0}, {0.0}, {2.0}}, n);
}

InitialDatum datum_smooth(int n) {
    PeriodicGrid grid(n);
    const double amp = 1.0 / (std::sqrt(2.0) * kPi);
    GridFn u = map_nodes(grid, [&](double x) { return amp * std::sin(2.0 * kPi * x); });
    GridFn rho = map_nodes(grid, [&](double) { return std::sqrt(3.0); });
    return datum_from_samples(std::move(u), std::move(rho));
}

InitialDatum datum_pw(int n) {
    return datum_from_structured(
        StructuredDatum{{0.0, 0.25, 0.5, 1.0}, {-2.0, 2.0, 0.0}, {0.0, 0.0, 2.0}}, n);
}

InitialDatum datum_pw_zero_min(int n) {
    // rho vanishes on [0, 1/2] where u_x takes values {0, 2}; the minimum 0
    // puts the breakdown time at pi/2.
    return datum_from_structured(
        StructuredDatum{{0.0, 0.25, 0.5, 1.0}, {0.0, 2.0, -1.0}, {0.0, 0.0, std::sqrt(5.0)}},
        n);
}

namespace {

using nlohmann::json;

std::vector<double> as_doubles(const json& arr, const std::string& what) {
    if (!arr.is_array()) throw std::invalid_argument("datum file: " + what + " must be an array");
    std::vector<double> out;
    out.reserve(arr.size());
    for (const auto& v : arr) {
        if (!v.is_number()) throw std::invalid_argument("datum file: " + what + " must be numeric");
        out.push_back(v.get<double>());
    }
    return out;
}

}  // namespace

InitialDatum load_datum(const std::string& path, int n, bool auto_normalize,
                        double* alpha_out) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("datum file: cannot open " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw std::invalid_argument("datum file: malformed JSON: " + std::string(e.what()));
    }
    if (alpha_out) *alpha_out = 1.0;

    if (doc.contains("structured")) {
        const json& s = doc["structured"];
        StructuredDatum sd;
        sd.breakpoints = as_doubles(s.at("breakpoints"), "breakpoints");
        sd.ux = as_doubles(s.at("ux"), "ux");
        sd.rho = as_doubles(s.at("rho"), "rho");
        if (auto_normalize) {
            double energy = 0.0;
            for (int i = 0; i < sd.pieces(); ++i)
                energy += (sd.ux[i] * sd.ux[i] + sd.rho[i] * sd.rho[i]) * sd.piece_length(i);
            if (energy <= 1e-14)
                throw std::invalid_argument("datum file: zero datum cannot be normalized");
            const double alpha = 2.0 / std::sqrt(energy);
            for (double& v : sd.ux) v *= alpha;
            for (double& v : sd.rho) v *= alpha;
            if (alpha_out) *alpha_out = alpha;
        }
        return datum_from_structured(std::move(sd), n);
    }
    if (doc.contains("samples")) {
        const json& s = doc["samples"];
        if (!s.contains("n") || !s.at("n").is_number_integer())
            throw std::invalid_argument("datum file: samples.n must be an integer");
        const int n_file = s.at("n").get<int>();
        std::vector<double> u = as_doubles(s.at("u"), "u");
        std::vector<double> rho = as_doubles(s.at("rho"), "rho");
        if (static_cast<int>(u.size()) != n_file || static_cast<int>(rho.size()) != n_file)
            throw std::invalid_argument("datum file: sample arrays must have length n");
        PeriodicGrid file_grid(n_file);
        if (n != n_file) {
            u = fourier::resample(u, n);
            rho = fourier::resample(rho, n);
        }
        PeriodicGrid grid(n);
        GridFn fu(grid, std::move(u)), frho(grid, std::move(rho));
        if (auto_normalize) {
            auto [d, alpha] = normalize(fu, frho);
            if (alpha_out) *alpha_out = alpha;
            return d;
        }
        return datum_from_samples(std::move(fu), std::move(frho));
    }
    throw std::invalid_argument("datum file: expected top-level \"samples\" or \"structured\"");
}

void save_datum_samples(const InitialDatum& d, const std::string& path) {
    nlohmann::json doc;
    doc["samples"]["n"] = d.n();
    doc["samples"]["u"] = d.u.values;
    doc["samples"]["rho"] = d.rho.values;
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("datum file: cannot write " + path);
    out << doc.dump(2) << "\n";
}

}  // namespace hs2
