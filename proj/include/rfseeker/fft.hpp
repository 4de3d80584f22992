// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors
//
// Iterative radix-2 FFT for power-of-two sizes. Small fixed sizes only
// (observation windows), so no planning layer is needed and results are
// bit-reproducible run to run.

#pragma once

#include "rfseeker/common.hpp"

#include <bit>
#include <stdexcept>
#include <vector>

namespace rfseeker {

namespace detail {

// half-size table of e^{-j 2 pi k / n}, k in [0, n/2)
inline const std::vector<cplx> &twiddles(size_t n) {
    thread_local std::vector<cplx> table;
    thread_local size_t table_n = 0;
    if (table_n != n) {
        table.resize(n / 2);
        for (size_t k = 0; k < n / 2; ++k) {
            double ang = -2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
            table[k] = {std::cos(ang), std::sin(ang)};
        }
        table_n = n;
    }
    return table;
}

} // namespace detail

// in-place forward FFT, X[k] = sum_n x[n] e^{-j 2 pi k n / N}
inline void fft(std::vector<cplx> &x) {
    size_t n = x.size();
    if (n == 0 || !std::has_single_bit(n))
        throw std::invalid_argument("fft: size must be a power of two");
    if (n == 1)
        return;

    // bit-reversal permutation
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1)
            j ^= bit;
        j ^= bit;
        if (i < j)
            std::swap(x[i], x[j]);
    }

    const auto &tw = detail::twiddles(n);
    for (size_t len = 2; len <= n; len <<= 1) {
        size_t stride = n / len;
        for (size_t base = 0; base < n; base += len) {
            for (size_t k = 0; k < len / 2; ++k) {
                cplx w = tw[k * stride];
                cplx u = x[base + k];
                cplx v = x[base + k + len / 2] * w;
                x[base + k] = u + v;
                x[base + k + len / 2] = u - v;
            }
        }
    }
}

// in-place inverse FFT including the 1/N factor
inline void ifft(std::vector<cplx> &x) {
    size_t n = x.size();
    for (auto &v : x)
        v = std::conj(v);
    fft(x);
    double scale = 1.0 / static_cast<double>(n);
    for (auto &v : x)
        v = std::conj(v) * scale;
}

// baseband frequency of FFT bin k at sample rate fs (negative for the upper half)
inline double fft_bin_freq(size_t k, size_t n, double fs) {
    auto ks = static_cast<ptrdiff_t>(k);
    auto ns = static_cast<ptrdiff_t>(n);
    if (ks >= ns / 2)
        ks -= ns;
    return fs * static_cast<double>(ks) / static_cast<double>(ns);
}

} // namespace rfseeker
