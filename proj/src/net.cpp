// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors

#include "rfseeker/net.hpp"

namespace rfseeker {

// Gaussian matrix orthogonalized by two passes of modified Gram-Schmidt.
// rows >= cols gives orthonormal columns, otherwise orthonormal rows.
std::vector<double> orthogonal_matrix(int rows, int cols, double gain, Rng &rng) {
    if (rows < 1 || cols < 1)
        throw std::invalid_argument("orthogonal_matrix: empty shape");
    bool flip = rows < cols;
    int R = flip ? cols : rows;
    int C = flip ? rows : cols;

    std::vector<double> a(static_cast<size_t>(R) * C);
    for (auto &v : a)
        v = rng.normal();
    for (int pass = 0; pass < 2; ++pass) {
        for (int j = 0; j < C; ++j) {
            for (int k = 0; k < j; ++k) {
                double dot = 0.0;
                for (int r = 0; r < R; ++r)
                    dot += a[static_cast<size_t>(r) * C + k] * a[static_cast<size_t>(r) * C + j];
                for (int r = 0; r < R; ++r)
                    a[static_cast<size_t>(r) * C + j] -=
                        dot * a[static_cast<size_t>(r) * C + k];
            }
            double nn = 0.0;
            for (int r = 0; r < R; ++r)
                nn += sqr(a[static_cast<size_t>(r) * C + j]);
            double inv = 1.0 / std::sqrt(nn);
            for (int r = 0; r < R; ++r)
                a[static_cast<size_t>(r) * C + j] *= inv;
        }
    }

    std::vector<double> out(static_cast<size_t>(rows) * cols);
    if (flip) {
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c)
                out[static_cast<size_t>(r) * cols + c] = gain * a[static_cast<size_t>(c) * C + r];
    } else {
        for (auto &v : a)
            v *= gain;
        out = std::move(a);
    }
    return out;
}

} // namespace rfseeker
