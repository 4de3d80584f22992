// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors
//
// Dense and convolution compute kernels shared by the network layers.
// The optimized versions parallelize over output elements only, with a fixed
// accumulation order per element, so results are identical for any worker
// count. kernels::ref holds plain reference loops; tests compare the two and
// the bench target times them against each other.
//
// Layouts (row-major, contiguous):
//   activations  x[B][in]
//   dense weight w[in][out]   (input-major so the forward inner loop is unit stride)
//   conv input   x[B][L][C]   (channel-last)
//   conv weight  w[K*IC][OC]  (tap-major, then input channel)

#pragma once

#include <cmath>
#include <cstddef>

namespace rfseeker::kernels {

// y[b][o] = sum_i x[b][i] * w[i][o] + bias[o]
// bias may be null (treated as zero); accumulate adds onto existing y instead
template <typename T>
void dense_forward(const T *__restrict x, const T *__restrict w, const T *__restrict bias,
                   T *__restrict y, int B, int in, int out, bool accumulate = false) {
#pragma omp parallel for schedule(static) if (B > 1)
    for (int b = 0; b < B; ++b) {
        T *yb = y + static_cast<size_t>(b) * out;
        if (!accumulate) {
            for (int o = 0; o < out; ++o)
                yb[o] = bias ? bias[o] : T(0);
        } else if (bias) {
            for (int o = 0; o < out; ++o)
                yb[o] += bias[o];
        }
        const T *xb = x + static_cast<size_t>(b) * in;
        for (int i = 0; i < in; ++i) {
            T xi = xb[i];
            const T *wi = w + static_cast<size_t>(i) * out;
#pragma omp simd
            for (int o = 0; o < out; ++o)
                yb[o] += xi * wi[o];
        }
    }
}

// dx[b][i] = sum_o dy[b][o] * w[i][o]
template <typename T>
void dense_backward_data(const T *__restrict dy, const T *__restrict w, T *__restrict dx, int B,
                         int in, int out) {
#pragma omp parallel for schedule(static) if (B > 1)
    for (int b = 0; b < B; ++b) {
        const T *dyb = dy + static_cast<size_t>(b) * out;
        T *dxb = dx + static_cast<size_t>(b) * in;
        for (int i = 0; i < in; ++i) {
            const T *wi = w + static_cast<size_t>(i) * out;
            T acc = T(0);
#pragma omp simd reduction(+ : acc)
            for (int o = 0; o < out; ++o)
                acc += dyb[o] * wi[o];
            dxb[i] = acc;
        }
    }
}

// dw[i][o] += sum_b x[b][i] * dy[b][o];  db[o] += sum_b dy[b][o] (db may be null)
template <typename T>
void dense_backward_param(const T *__restrict x, const T *__restrict dy, T *__restrict dw,
                          T *__restrict db, int B, int in, int out) {
#pragma omp parallel for schedule(static) if (in > 1)
    for (int i = 0; i < in; ++i) {
        T *dwi = dw + static_cast<size_t>(i) * out;
        for (int b = 0; b < B; ++b) {
            T xi = x[static_cast<size_t>(b) * in + i];
            const T *dyb = dy + static_cast<size_t>(b) * out;
#pragma omp simd
            for (int o = 0; o < out; ++o)
                dwi[o] += xi * dyb[o];
        }
    }
    if (db) {
        for (int b = 0; b < B; ++b) {
            const T *dyb = dy + static_cast<size_t>(b) * out;
            for (int o = 0; o < out; ++o)
                db[o] += dyb[o];
        }
    }
}

// Convolutions use a channel-last activation layout x[B][L][C]. The input
// window for output position p is then the contiguous block of K*C values
// starting at row p*stride, so the convolution is a matrix product against
// the weight stored as w[K*IC][OC] and runs at dense-kernel speed.

// y[b][p][oc] = bias[oc] + sum_{t,ic} x[b][p*stride+t][ic] * w[t*IC+ic][oc]
template <typename T>
void conv1d_forward(const T *__restrict x, const T *__restrict w, const T *__restrict bias,
                    T *__restrict y, int B, int L, int IC, int OC, int K, int stride) {
    int P = (L - K) / stride + 1;
    int win = K * IC;
#pragma omp parallel for collapse(2) schedule(static) if (B * P > 1)
    for (int b = 0; b < B; ++b) {
        for (int p = 0; p < P; ++p) {
            const T *xw = x + (static_cast<size_t>(b) * L + static_cast<size_t>(p) * stride) * IC;
            T *yr = y + (static_cast<size_t>(b) * P + p) * OC;
            for (int o = 0; o < OC; ++o)
                yr[o] = bias ? bias[o] : T(0);
            for (int i = 0; i < win; ++i) {
                T xi = xw[i];
                const T *wi = w + static_cast<size_t>(i) * OC;
#pragma omp simd
                for (int o = 0; o < OC; ++o)
                    yr[o] += xi * wi[o];
            }
        }
    }
}

// dx[b][p*stride+t][ic] += sum_oc dy[b][p][oc] * w[t*IC+ic][oc]; dx zeroed by caller
template <typename T>
void conv1d_backward_data(const T *__restrict dy, const T *__restrict w, T *__restrict dx, int B,
                          int L, int IC, int OC, int K, int stride) {
    int P = (L - K) / stride + 1;
    int win = K * IC;
#pragma omp parallel for schedule(static) if (B > 1)
    for (int b = 0; b < B; ++b) {
        for (int p = 0; p < P; ++p) {
            const T *dyr = dy + (static_cast<size_t>(b) * P + p) * OC;
            T *dxw = dx + (static_cast<size_t>(b) * L + static_cast<size_t>(p) * stride) * IC;
            for (int i = 0; i < win; ++i) {
                const T *wi = w + static_cast<size_t>(i) * OC;
                T acc = T(0);
#pragma omp simd reduction(+ : acc)
                for (int o = 0; o < OC; ++o)
                    acc += dyr[o] * wi[o];
                dxw[i] += acc;
            }
        }
    }
}

// dw[t*IC+ic][oc] += sum_{b,p} x[b][p*stride+t][ic] * dy[b][p][oc]; db[oc] += sum dy
template <typename T>
void conv1d_backward_param(const T *__restrict x, const T *__restrict dy, T *__restrict dw,
                           T *__restrict db, int B, int L, int IC, int OC, int K, int stride) {
    int P = (L - K) / stride + 1;
    int win = K * IC;
#pragma omp parallel for schedule(static) if (win > 1)
    for (int i = 0; i < win; ++i) {
        T *dwi = dw + static_cast<size_t>(i) * OC;
        for (int b = 0; b < B; ++b)
            for (int p = 0; p < P; ++p) {
                T xi = x[(static_cast<size_t>(b) * L + static_cast<size_t>(p) * stride) * IC + i];
                const T *dyr = dy + (static_cast<size_t>(b) * P + p) * OC;
#pragma omp simd
                for (int o = 0; o < OC; ++o)
                    dwi[o] += xi * dyr[o];
            }
    }
    if (db) {
        for (int b = 0; b < B; ++b)
            for (int p = 0; p < P; ++p) {
                const T *dyr = dy + (static_cast<size_t>(b) * P + p) * OC;
                for (int o = 0; o < OC; ++o)
                    db[o] += dyr[o];
            }
    }
}

// sum of squares accumulated in double, used for gradient norms
template <typename T> double sum_squares(const T *v, size_t n) {
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i)
        acc += static_cast<double>(v[i]) * static_cast<double>(v[i]);
    return acc;
}

// Plain reference implementations. Kept deliberately simple; the unit tests
// check the optimized kernels against these.
namespace ref {

template <typename T>
void dense_forward(const T *x, const T *w, const T *bias, T *y, int B, int in, int out,
                   bool accumulate = false) {
    for (int b = 0; b < B; ++b)
        for (int o = 0; o < out; ++o) {
            T acc = accumulate ? y[b * out + o] : T(0);
            if (bias)
                acc += bias[o];
            for (int i = 0; i < in; ++i)
                acc += x[b * in + i] * w[i * out + o];
            y[b * out + o] = acc;
        }
}

template <typename T>
void dense_backward_data(const T *dy, const T *w, T *dx, int B, int in, int out) {
    for (int b = 0; b < B; ++b)
        for (int i = 0; i < in; ++i) {
            T acc = T(0);
            for (int o = 0; o < out; ++o)
                acc += dy[b * out + o] * w[i * out + o];
            dx[b * in + i] = acc;
        }
}

template <typename T>
void dense_backward_param(const T *x, const T *dy, T *dw, T *db, int B, int in, int out) {
    for (int b = 0; b < B; ++b) {
        for (int i = 0; i < in; ++i)
            for (int o = 0; o < out; ++o)
                dw[i * out + o] += x[b * in + i] * dy[b * out + o];
        if (db)
            for (int o = 0; o < out; ++o)
                db[o] += dy[b * out + o];
    }
}

template <typename T>
void conv1d_forward(const T *x, const T *w, const T *bias, T *y, int B, int L, int IC, int OC,
                    int K, int stride) {
    int P = (L - K) / stride + 1;
    for (int b = 0; b < B; ++b)
        for (int p = 0; p < P; ++p)
            for (int oc = 0; oc < OC; ++oc) {
                T acc = bias ? bias[oc] : T(0);
                for (int t = 0; t < K; ++t)
                    for (int ic = 0; ic < IC; ++ic)
                        acc += w[(t * IC + ic) * OC + oc] *
                               x[(b * L + p * stride + t) * IC + ic];
                y[(b * P + p) * OC + oc] = acc;
            }
}

template <typename T>
void conv1d_backward_data(const T *dy, const T *w, T *dx, int B, int L, int IC, int OC, int K,
                          int stride) {
    int P = (L - K) / stride + 1;
    for (int b = 0; b < B; ++b)
        for (int p = 0; p < P; ++p)
            for (int oc = 0; oc < OC; ++oc)
                for (int t = 0; t < K; ++t)
                    for (int ic = 0; ic < IC; ++ic)
                        dx[(b * L + p * stride + t) * IC + ic] +=
                            dy[(b * P + p) * OC + oc] * w[(t * IC + ic) * OC + oc];
}

template <typename T>
void conv1d_backward_param(const T *x, const T *dy, T *dw, T *db, int B, int L, int IC, int OC,
                           int K, int stride) {
    int P = (L - K) / stride + 1;
    for (int b = 0; b < B; ++b)
        for (int p = 0; p < P; ++p) {
            for (int oc = 0; oc < OC; ++oc) {
                for (int t = 0; t < K; ++t)
                    for (int ic = 0; ic < IC; ++ic)
                        dw[(t * IC + ic) * OC + oc] +=
                            x[(b * L + p * stride + t) * IC + ic] * dy[(b * P + p) * OC + oc];
                if (db)
                    db[oc] += dy[(b * P + p) * OC + oc];
            }
        }
}

} // namespace ref

} // namespace rfseeker::kernels
