#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace hs2 {

/// Uniform grid on the unit circle S = R/Z with nodes x_j = j/n, j = 0..n-1.
/// n must be even (Nyquist handling in the collocation derivative) and >= 8.
struct PeriodicGrid {
    int n = 0;

    PeriodicGrid() = default;
    explicit PeriodicGrid(int nodes) : n(nodes) {
        if (n < 8 || n % 2 != 0)
            throw std::invalid_argument("PeriodicGrid: n must be even and >= 8, got " +
                                        std::to_string(nodes));
    }

    double node(int j) const { return static_cast<double>(j) / n; }
    double spacing() const { return 1.0 / n; }

    bool operator==(const PeriodicGrid&) const = default;
};

/// A real function sampled at the grid nodes. Carrier for u, rho, phi, f, g
/// and every other function of x in the solver. Values are immutable by
/// convention once a field has been handed out.
struct GridFn {
    PeriodicGrid grid;
    std::vector<double> values;

    GridFn() = default;
    explicit GridFn(PeriodicGrid g, double fill = 0.0)
        : grid(g), values(static_cast<std::size_t>(g.n), fill) {}
    GridFn(PeriodicGrid g, std::vector<double> v) : grid(g), values(std::move(v)) {
        if (static_cast<int>(values.size()) != grid.n)
            throw std::invalid_argument("GridFn: values length must equal grid.n");
    }

    int n() const { return grid.n; }
    double x(int j) const { return grid.node(j); }
    double& operator[](int j) { return values[static_cast<std::size_t>(j)]; }
    double operator[](int j) const { return values[static_cast<std::size_t>(j)]; }

    /// Sample with periodic wrap of the index.
    double at_wrapped(int j) const {
        int m = grid.n;
        int k = ((j % m) + m) % m;
        return values[static_cast<std::size_t>(k)];
    }
};

/// Throws if any sample is non-finite. Used at ingestion boundaries; fields
/// with masked (NaN) entries are handled separately and never pass through.
inline void check_finite(const GridFn& f, const std::string& name) {
    for (double v : f.values)
        if (!std::isfinite(v))
            throw std::invalid_argument(name + ": non-finite sample");
}

template <typename F>
GridFn map_nodes(const PeriodicGrid& g, F&& fn) {
    GridFn out(g);
    for (int j = 0; j < g.n; ++j) out[j] = fn(g.node(j));
    return out;
}

template <typename F>
GridFn zip(const GridFn& a, const GridFn& b, F&& fn) {
    if (!(a.grid == b.grid)) throw std::invalid_argument("zip: grid mismatch");
    GridFn out(a.grid);
    for (int j = 0; j < a.n(); ++j) out[j] = fn(a[j], b[j]);
    return out;
}

}  // namespace hs2
