// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace rfseeker {

struct GaeResult {
    std::vector<double> advantages;
    std::vector<double> returns; // advantage + value, the critic target
};

// Backward recursion over one trajectory segment:
//   delta_t = r_t + gamma * (1 - done_t) * V_{t+1} - V_t
//   A_t     = delta_t + gamma * lambda * (1 - done_t) * A_{t+1}
// with V_T = bootstrap_value. A done step cuts both terms so segments after
// an episode boundary are independent of rewards before it.
inline GaeResult compute_gae(const std::vector<double> &rewards,
                             const std::vector<double> &values,
                             const std::vector<uint8_t> &dones, double bootstrap_value,
                             double gamma, double lam) {
    const size_t T = rewards.size();
    if (values.size() != T || dones.size() != T)
        throw std::invalid_argument("compute_gae: length mismatch");
    GaeResult out;
    out.advantages.assign(T, 0.0);
    out.returns.assign(T, 0.0);
    double next_adv = 0.0;
    double next_value = bootstrap_value;
    for (size_t i = T; i-- > 0;) {
        const double mask = dones[i] ? 0.0 : 1.0;
        const double delta = rewards[i] + gamma * mask * next_value - values[i];
        next_adv = delta + gamma * lam * mask * next_adv;
        out.advantages[i] = next_adv;
        out.returns[i] = next_adv + values[i];
        next_value = values[i];
    }
    return out;
}

// Whole-batch standardization to mean 0, std 1 (population form). The floor
// keeps a degenerate batch from dividing by zero.
inline void normalize_advantages(std::vector<double> &adv) {
    if (adv.empty())
        throw std::invalid_argument("normalize_advantages: empty batch");
    double mean = 0.0;
    for (double a : adv)
        mean += a;
    mean /= static_cast<double>(adv.size());
    double var = 0.0;
    for (double a : adv)
        var += (a - mean) * (a - mean);
    var /= static_cast<double>(adv.size());
    const double sd = std::sqrt(var) + 1e-8;
    for (double &a : adv)
        a = (a - mean) / sd;
}

} // namespace rfseeker
