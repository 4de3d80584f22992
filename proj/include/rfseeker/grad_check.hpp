// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors

#pragma once

#include "rfseeker/nn.hpp"
#include "rfseeker/rng.hpp"

namespace rfseeker {

// Central finite differences against an analytic gradient on randomly probed
// coordinates. Returns the worst symmetric relative error. The loss callable
// must be a deterministic function of the parameters.
template <typename F>
double grad_check(F &&loss, const ParamsT<double> &at, const ParamsT<double> &analytic,
                  int n_probes, Rng &rng, double step = 1e-5) {
    if (!same_shape(at, analytic))
        throw std::invalid_argument("grad_check: gradient shape mismatch");
    size_t total = param_count(at);
    if (total == 0)
        return 0.0;

    ParamsT<double> work = at;
    double worst = 0.0;
    for (int probe = 0; probe < n_probes; ++probe) {
        size_t flat = rng.uniform_int(total);
        size_t bi = 0, ti = 0;
        for (bi = 0; bi < work.blocks.size(); ++bi) {
            bool found = false;
            for (ti = 0; ti < work.blocks[bi].tensors.size(); ++ti) {
                size_t n = work.blocks[bi].tensors[ti].size();
                if (flat < n) {
                    found = true;
                    break;
                }
                flat -= n;
            }
            if (found)
                break;
        }
        double &coord = work.blocks[bi].tensors[ti].data[flat];
        double orig = coord;
        coord = orig + step;
        double lp = loss(std::as_const(work));
        coord = orig - step;
        double lm = loss(std::as_const(work));
        coord = orig;
        double fd = (lp - lm) / (2.0 * step);
        double an = analytic.blocks[bi].tensors[ti].data[flat];
        double rel = std::abs(fd - an) / std::max(1e-8, std::abs(fd) + std::abs(an));
        worst = std::max(worst, rel);
    }
    return worst;
}

} // namespace rfseeker
