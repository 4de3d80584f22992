// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors

#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>

namespace rfseeker {

// Linear decay from eps_start at step 0 to eps_end at decay_fraction * total,
// constant afterwards. Endpoints are exact.
inline double epsilon_at(int64_t step, double eps_start, double eps_end,
                         double decay_fraction, int64_t total_steps) {
    if (step < 0)
        throw std::invalid_argument("epsilon_at: negative step");
    const double horizon = decay_fraction * static_cast<double>(total_steps);
    if (horizon <= 0.0 || static_cast<double>(step) >= horizon)
        return eps_end;
    const double t = static_cast<double>(step) / horizon;
    return eps_start + (eps_end - eps_start) * t;
}

// Linear anneal to zero over the training budget, clamped at zero.
inline double annealed_lr(double lr0, int64_t step, int64_t total_steps) {
    if (total_steps <= 0)
        return lr0;
    double frac = 1.0 - static_cast<double>(step) / static_cast<double>(total_steps);
    return lr0 * std::max(0.0, frac);
}

} // namespace rfseeker
