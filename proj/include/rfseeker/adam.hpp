// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors

#pragma once

#include "rfseeker/nn.hpp"

namespace rfseeker {

template <typename T> struct AdamState {
    ParamsT<T> m, v;
    int64_t step = 0;
};

template <typename T> AdamState<T> make_adam_state(const ParamsT<T> &like) {
    AdamState<T> s;
    s.m = zeros_like(like);
    s.v = zeros_like(like);
    return s;
}

// One Adam update with bias correction. block_lr carries one learning rate
// per parameter block (the meta optimizer drives heads and trunk at
// different rates). Rejects non-finite gradients before touching anything.
template <typename T>
void adam_update(ParamsT<T> &p, const ParamsT<T> &g, AdamState<T> &s,
                 const std::vector<double> &block_lr, double beta1 = 0.9, double beta2 = 0.999,
                 double eps = 1e-5) {
    if (!same_shape(p, g) || !same_shape(p, s.m))
        throw std::invalid_argument("adam: parameter/gradient shape mismatch");
    if (block_lr.size() != p.blocks.size())
        throw std::invalid_argument("adam: need one learning rate per block");
    if (!params_finite(g))
        throw std::invalid_argument("adam: non-finite gradient, update rejected");

    s.step += 1;
    double c1 = 1.0 - std::pow(beta1, static_cast<double>(s.step));
    double c2 = 1.0 - std::pow(beta2, static_cast<double>(s.step));
    for (size_t bi = 0; bi < p.blocks.size(); ++bi) {
        double lr = block_lr[bi];
        for (size_t ti = 0; ti < p.blocks[bi].tensors.size(); ++ti) {
            auto &pd = p.blocks[bi].tensors[ti].data;
            const auto &gd = g.blocks[bi].tensors[ti].data;
            auto &md = s.m.blocks[bi].tensors[ti].data;
            auto &vd = s.v.blocks[bi].tensors[ti].data;
            for (size_t k = 0; k < pd.size(); ++k) {
                double gk = static_cast<double>(gd[k]);
                double mk = beta1 * static_cast<double>(md[k]) + (1.0 - beta1) * gk;
                double vk = beta2 * static_cast<double>(vd[k]) + (1.0 - beta2) * gk * gk;
                md[k] = static_cast<T>(mk);
                vd[k] = static_cast<T>(vk);
                pd[k] -= static_cast<T>(lr * (mk / c1) / (std::sqrt(vk / c2) + eps));
            }
        }
    }
}

template <typename T>
void adam_update(ParamsT<T> &p, const ParamsT<T> &g, AdamState<T> &s, double lr,
                 double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-5) {
    adam_update(p, g, s, std::vector<double>(p.blocks.size(), lr), beta1, beta2, eps);
}

} // namespace rfseeker
