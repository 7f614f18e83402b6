#include "hs2/fourier.hpp"

#include <cmath>
#include <stdexcept>

namespace hs2::fourier {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Iterative radix-2 Cooley-Tukey, in place. sign = -1 forward, +1 inverse.
void fft_pow2(std::vector<cplx>& a, int sign) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * kTwoPi / static_cast<double>(len);
        const cplx wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                cplx u = a[i + k];
                cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

std::vector<cplx> dft_direct(const std::vector<cplx>& a, int sign) {
    const std::size_t n = a.size();
    std::vector<cplx> out(n, cplx(0.0, 0.0));
    for (std::size_t k = 0; k < n; ++k) {
        cplx acc(0.0, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            const double ang = sign * kTwoPi * static_cast<double>(j) *
                               static_cast<double>(k) / static_cast<double>(n);
            acc += a[j] * cplx(std::cos(ang), std::sin(ang));
        }
        out[k] = acc;
    }
    return out;
}

void transform(std::vector<cplx>& a, int sign) {
    if (is_pow2(a.size()))
        fft_pow2(a, sign);
    else
        a = dft_direct(a, sign);
}

// Signed mode index for slot k of an n-point transform; the Nyquist slot
// maps to 0 so that derivative/antiderivative both drop it.
int signed_mode(std::size_t k, std::size_t n) {
    if (2 * k < n) return static_cast<int>(k);
    if (2 * k == n) return 0;
    return static_cast<int>(k) - static_cast<int>(n);
}

}  // namespace

std::vector<cplx> forward(const std::vector<double>& f) {
    std::vector<cplx> a(f.begin(), f.end());
    transform(a, -1);
    return a;
}

std::vector<double> inverse_real(const std::vector<cplx>& F) {
    std::vector<cplx> a = F;
    transform(a, +1);
    std::vector<double> out(a.size());
    const double inv = 1.0 / static_cast<double>(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) out[j] = a[j].real() * inv;
    return out;
}

std::vector<double> derivative(const std::vector<double>& f) {
    const std::size_t n = f.size();
    std::vector<cplx> F = forward(f);
    for (std::size_t k = 0; k < n; ++k) {
        const int m = signed_mode(k, n);
        // Mean and Nyquist slots both differentiate to zero.
        F[k] = (m == 0) ? cplx(0.0, 0.0) : F[k] * cplx(0.0, kTwoPi * m);
    }
    return inverse_real(F);
}

std::vector<double> antiderivative(const std::vector<double>& f) {
    const std::size_t n = f.size();
    std::vector<cplx> F = forward(f);
    F[0] = cplx(0.0, 0.0);
    for (std::size_t k = 1; k < n; ++k) {
        const int m = signed_mode(k, n);
        if (m == 0)
            F[k] = cplx(0.0, 0.0);  // Nyquist dropped
        else
            F[k] /= cplx(0.0, kTwoPi * m);
    }
    std::vector<double> g = inverse_real(F);
    const double g0 = g[0];
    for (double& v : g) v -= g0;
    return g;
}

std::vector<double> resample(const std::vector<double>& f, int m) {
    const int n = static_cast<int>(f.size());
    if (m == n) return f;
    if (m < 8 || m % 2 != 0)
        throw std::invalid_argument("resample: target size must be even and >= 8");
    std::vector<cplx> F = forward(f);
    std::vector<cplx> G(static_cast<std::size_t>(m), cplx(0.0, 0.0));
    const int half = std::min(n, m) / 2;
    const double scale = static_cast<double>(m) / static_cast<double>(n);
    G[0] = F[0] * scale;
    for (int k = 1; k < half; ++k) {
        G[static_cast<std::size_t>(k)] = F[static_cast<std::size_t>(k)] * scale;
        G[static_cast<std::size_t>(m - k)] = F[static_cast<std::size_t>(n - k)] * scale;
    }
    if (m > n) {
        // Split the source Nyquist mode symmetrically.
        const cplx ny = F[static_cast<std::size_t>(n / 2)] * (0.5 * scale);
        G[static_cast<std::size_t>(n / 2)] = ny;
        G[static_cast<std::size_t>(m - n / 2)] = ny;
    } else {
        // Fold the pair of source modes that land on the target Nyquist slot.
        G[static_cast<std::size_t>(m / 2)] =
            (F[static_cast<std::size_t>(m / 2)] + F[static_cast<std::size_t>(n - m / 2)]) *
            (0.5 * scale);
    }
    return inverse_real(G);
}

}  // namespace hs2::fourier
