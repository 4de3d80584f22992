// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors

#pragma once

#include "rfseeker/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace rfseeker {

// Small categorical-distribution helpers over action logits. All internal
// arithmetic runs in double regardless of the logit storage type.

template <typename T> void softmax(const T *logits, int n, double *probs) {
    double mx = static_cast<double>(logits[0]);
    for (int i = 1; i < n; ++i)
        mx = std::max(mx, static_cast<double>(logits[i]));
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        probs[i] = std::exp(static_cast<double>(logits[i]) - mx);
        sum += probs[i];
    }
    for (int i = 0; i < n; ++i)
        probs[i] /= sum;
}

template <typename T> double log_sum_exp(const T *logits, int n) {
    double mx = static_cast<double>(logits[0]);
    for (int i = 1; i < n; ++i)
        mx = std::max(mx, static_cast<double>(logits[i]));
    double sum = 0.0;
    for (int i = 0; i < n; ++i)
        sum += std::exp(static_cast<double>(logits[i]) - mx);
    return mx + std::log(sum);
}

template <typename T> double categorical_log_prob(const T *logits, int n, int action) {
    if (action < 0 || action >= n)
        throw std::invalid_argument("categorical: action out of range");
    return static_cast<double>(logits[action]) - log_sum_exp(logits, n);
}

template <typename T> double categorical_entropy(const T *logits, int n) {
    double lse = log_sum_exp(logits, n);
    double h = 0.0;
    for (int i = 0; i < n; ++i) {
        double lp = static_cast<double>(logits[i]) - lse;
        h -= std::exp(lp) * lp;
    }
    return h;
}

// ties resolve to the lowest index, keeping greedy evaluation deterministic
template <typename T> int argmax_index(const T *v, int n) {
    int best = 0;
    for (int i = 1; i < n; ++i)
        if (v[i] > v[best])
            best = i;
    return best;
}

struct CategoricalOut {
    int action = 0;
    double log_prob = 0.0;
    double entropy = 0.0;
};

template <typename T> CategoricalOut categorical_sample(const T *logits, int n, Rng &rng) {
    std::vector<double> probs(static_cast<size_t>(n));
    softmax(logits, n, probs.data());
    double u = rng.uniform01();
    double acc = 0.0;
    int action = n - 1; // falls through on rounding leftovers
    for (int i = 0; i < n; ++i) {
        acc += probs[i];
        if (u < acc) {
            action = i;
            break;
        }
    }
    CategoricalOut out;
    out.action = action;
    out.log_prob = categorical_log_prob(logits, n, action);
    out.entropy = categorical_entropy(logits, n);
    return out;
}

} // namespace rfseeker
