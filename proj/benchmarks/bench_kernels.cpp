// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors
//
// Times the optimized kernels against the plain reference loops at the shapes
// the agents actually use. Run with RFSEEKER_THREADS set to compare worker
// counts.

#include "rfseeker/kernels.hpp"
#include "rfseeker/rng.hpp"
#include "rfseeker/threads.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace rfseeker;

namespace {

double time_ms(const std::function<void()> &fn, int reps) {
    fn(); // warm up
    auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i)
        fn();
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

void report(const std::string &name, double flops, double opt_ms, double ref_ms) {
    std::printf("%-28s %9.3f ms  %8.2f GF/s   ref %9.3f ms  speedup %5.2fx\n", name.c_str(),
                opt_ms, flops / opt_ms / 1e6, ref_ms, ref_ms / opt_ms);
}

struct Buffers {
    std::vector<float> x, w, b, y, dy, dx, dw, db;
};

Buffers make_dense(Rng &r, int B, int in, int out) {
    Buffers z;
    auto fill = [&r](std::vector<float> &v, size_t n) {
        v.resize(n);
        for (auto &e : v)
            e = static_cast<float>(r.normal());
    };
    fill(z.x, size_t(B) * in);
    fill(z.w, size_t(in) * out);
    fill(z.b, out);
    fill(z.y, size_t(B) * out);
    fill(z.dy, size_t(B) * out);
    fill(z.dx, size_t(B) * in);
    fill(z.dw, size_t(in) * out);
    fill(z.db, out);
    return z;
}

} // namespace

int main() {
    int workers = init_threads();
    std::printf("kernel benchmark, %d worker(s)\n\n", workers);
    Rng r(123);

    struct Shape {
        const char *name;
        int B, in, out;
        int reps;
    };
    for (auto s : {Shape{"dense 128x896->256", 128, 896, 256, 50},
                   Shape{"dense 128x256->256", 128, 256, 256, 100},
                   Shape{"dense gemv 1x512->2048", 1, 512, 2048, 200}}) {
        auto z = make_dense(r, s.B, s.in, s.out);
        double flops = 2.0 * s.B * s.in * s.out;
        double opt = time_ms(
            [&] {
                kernels::dense_forward(z.x.data(), z.w.data(), z.b.data(), z.y.data(), s.B, s.in,
                                       s.out);
            },
            s.reps);
        double ref = time_ms(
            [&] {
                kernels::ref::dense_forward(z.x.data(), z.w.data(), z.b.data(), z.y.data(), s.B,
                                            s.in, s.out);
            },
            s.reps > 10 ? s.reps / 10 : 1);
        report(std::string(s.name) + " fwd", flops, opt, ref);

        opt = time_ms(
            [&] {
                kernels::dense_backward_data(z.dy.data(), z.w.data(), z.dx.data(), s.B, s.in,
                                             s.out);
            },
            s.reps);
        ref = time_ms(
            [&] {
                kernels::ref::dense_backward_data(z.dy.data(), z.w.data(), z.dx.data(), s.B, s.in,
                                                  s.out);
            },
            s.reps > 10 ? s.reps / 10 : 1);
        report(std::string(s.name) + " bwd_dx", flops, opt, ref);

        opt = time_ms(
            [&] {
                kernels::dense_backward_param(z.x.data(), z.dy.data(), z.dw.data(), z.db.data(),
                                              s.B, s.in, s.out);
            },
            s.reps);
        ref = time_ms(
            [&] {
                kernels::ref::dense_backward_param(z.x.data(), z.dy.data(), z.dw.data(),
                                                   z.db.data(), s.B, s.in, s.out);
            },
            s.reps > 10 ? s.reps / 10 : 1);
        report(std::string(s.name) + " bwd_dw", flops, opt, ref);
    }

    {
        const int B = 128, IC = 8, L = 1024, OC = 16, K = 8, S = 4;
        const int P = (L - K) / S + 1;
        Rng rr(7);
        std::vector<float> x(size_t(B) * L * IC), w(size_t(K) * IC * OC), b(OC),
            y(size_t(B) * P * OC), dy(size_t(B) * P * OC), dx(size_t(B) * L * IC),
            dw(size_t(K) * IC * OC), db(OC);
        for (auto *v : {&x, &w, &b, &y, &dy})
            for (auto &e : *v)
                e = static_cast<float>(rr.normal());
        double flops = 2.0 * B * OC * P * IC * K;
        double opt = time_ms(
            [&] { kernels::conv1d_forward(x.data(), w.data(), b.data(), y.data(), B, L, IC, OC, K, S); },
            20);
        double ref = time_ms(
            [&] {
                kernels::ref::conv1d_forward(x.data(), w.data(), b.data(), y.data(), B, L, IC, OC,
                                             K, S);
            },
            2);
        report("conv1d 128x1024x8->16 fwd", flops, opt, ref);

        opt = time_ms(
            [&] {
                std::fill(dx.begin(), dx.end(), 0.0f);
                kernels::conv1d_backward_data(dy.data(), w.data(), dx.data(), B, L, IC, OC, K, S);
            },
            20);
        ref = time_ms(
            [&] {
                std::fill(dx.begin(), dx.end(), 0.0f);
                kernels::ref::conv1d_backward_data(dy.data(), w.data(), dx.data(), B, L, IC, OC, K,
                                                   S);
            },
            2);
        report("conv1d 128x1024x8->16 bwd_dx", flops, opt, ref);

        opt = time_ms(
            [&] {
                kernels::conv1d_backward_param(x.data(), dy.data(), dw.data(), db.data(), B, L, IC,
                                               OC, K, S);
            },
            20);
        ref = time_ms(
            [&] {
                kernels::ref::conv1d_backward_param(x.data(), dy.data(), dw.data(), db.data(), B,
                                                    L, IC, OC, K, S);
            },
            2);
        report("conv1d 128x1024x8->16 bwd_dw", flops, opt, ref);
    }

    return 0;
}
