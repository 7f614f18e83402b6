#pragma once

#include <complex>
#include <vector>

namespace hs2::fourier {

using cplx = std::complex<double>;

/// Forward DFT of a real sequence: F_k = sum_j f_j exp(-2*pi*i*j*k/n).
/// Radix-2 FFT when n is a power of two, direct DFT otherwise.
std::vector<cplx> forward(const std::vector<double>& f);

/// Inverse of forward(), real part (imaginary residue discarded).
std::vector<double> inverse_real(const std::vector<cplx>& F);

/// Collocation derivative: mode k multiplied by 2*pi*i*k with the Nyquist
/// mode zeroed. Spectrally accurate for smooth periodic samples.
std::vector<double> derivative(const std::vector<double>& f);

/// Periodic antiderivative: mode k divided by 2*pi*i*k (k != 0), the mean
/// and Nyquist modes dropped, and the result pinned to 0 at node 0.
/// The caller reattaches the secular part mean(f)*x when needed.
std::vector<double> antiderivative(const std::vector<double>& f);

/// Band-limited resampling from n to m nodes (both even). Exact whenever the
/// underlying function has no modes at or above min(n, m)/2.
std::vector<double> resample(const std::vector<double>& f, int m);

}  // namespace hs2::fourier
