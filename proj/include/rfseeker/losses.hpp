// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors

#pragma once

#include "rfseeker/categorical.hpp"
#include "rfseeker/net.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace rfseeker {

struct PpoLossConfig {
    double clip = 0.1;
    double ent_coef = 0.02;
    double vf_coef = 0.5;
};

// One optimization batch. Feedforward batches are flat rows; recurrent
// batches carry the step-major sequence layout plus the stored start memory
// and carry mask (0 where an episode begins). Row index is t * seq_batch + b
// for sequences, matching the network output layout.
struct PpoMinibatch {
    int rows = 0;
    int obs_dim = 0;
    int seq_steps = 0; // 0 means feedforward
    int seq_batch = 0;
    std::vector<float> obs;
    std::vector<int> actions;
    std::vector<double> logp_old;
    std::vector<double> adv; // normalized upstream
    std::vector<double> ret;
    std::vector<float> mem_h, mem_c; // [seq_batch][hidden]
    std::vector<float> carry;        // [seq_steps][seq_batch]

    bool recurrent() const { return seq_steps > 0; }
    void validate() const {
        if (rows < 1 || obs_dim < 1)
            throw std::invalid_argument("PpoMinibatch: empty");
        if (recurrent() && rows != seq_steps * seq_batch)
            throw std::invalid_argument("PpoMinibatch: sequence shape mismatch");
        const size_t n = static_cast<size_t>(rows);
        if (obs.size() != n * obs_dim || actions.size() != n || logp_old.size() != n ||
            adv.size() != n || ret.size() != n)
            throw std::invalid_argument("PpoMinibatch: field length mismatch");
    }
};

struct PpoLossStats {
    double loss = 0.0;
    double policy_loss = 0.0;
    double value_loss = 0.0;
    double entropy = 0.0;
    double clip_frac = 0.0;
};

namespace detail {

template <typename T> std::vector<T> to_precision(const std::vector<float> &v) {
    return std::vector<T>(v.begin(), v.end());
}

template <> inline std::vector<float> to_precision<float>(const std::vector<float> &v) {
    return v;
}

} // namespace detail

// Clipped-surrogate PPO objective over one minibatch:
//   loss = -mean min(ratio*A, clamp(ratio, 1-c, 1+c)*A)
//          + vf_coef * mean (V - ret)^2 - ent_coef * mean H
// Gradients accumulate into *grads when non-null. Pass nullptr to price a
// batch without touching parameters.
template <typename T>
PpoLossStats ppo_loss_grad(const PolicyNet<T> &net, const ParamsT<T> &params,
                           const PpoMinibatch &mb, const PpoLossConfig &cfg,
                           ParamsT<T> *grads) {
    mb.validate();
    if (net.recurrent() != mb.recurrent())
        throw std::invalid_argument("ppo_loss_grad: batch kind does not match arch");
    const std::vector<T> obs = detail::to_precision<T>(mb.obs);
    const int rows = mb.rows;
    const int A = net.n_actions();

    FwdCache<T> fcache;
    SeqCache<T> scache;
    NetOut<T> out;
    std::vector<T> carry;
    Memory<T> mem0;
    if (mb.recurrent()) {
        carry = detail::to_precision<T>(mb.carry);
        mem0 = zero_memory<T>(mb.seq_batch);
        mem0.h.assign(mb.mem_h.begin(), mb.mem_h.end());
        mem0.c.assign(mb.mem_c.begin(), mb.mem_c.end());
        out = net.seq_forward_train(params, obs.data(), mb.seq_steps, mb.seq_batch, mem0,
                                    carry.data(), scache);
    } else {
        out = net.forward_train(params, obs.data(), rows, fcache);
    }

    PpoLossStats st;
    std::vector<T> dlogits(static_cast<size_t>(rows) * A, T(0));
    std::vector<T> dvalue(rows, T(0));
    const double inv_n = 1.0 / rows;
    std::vector<double> p(A);
    for (int r = 0; r < rows; ++r) {
        const T *lrow = out.logits.data() + static_cast<size_t>(r) * A;
        softmax(lrow, A, p.data());
        const int a = mb.actions[r];
        if (a < 0 || a >= A)
            throw std::invalid_argument("ppo_loss_grad: action out of range");
        const double logp = std::log(std::max(p[a], 1e-300));
        const double ratio = std::exp(logp - mb.logp_old[r]);
        const double adv = mb.adv[r];
        const double clipped = std::min(std::max(ratio, 1.0 - cfg.clip), 1.0 + cfg.clip);
        const double surr1 = ratio * adv;
        const double surr2 = clipped * adv;
        st.policy_loss -= std::min(surr1, surr2) * inv_n;
        if (std::abs(ratio - 1.0) > cfg.clip)
            st.clip_frac += inv_n;

        double h = 0.0;
        for (int k = 0; k < A; ++k)
            if (p[k] > 0.0)
                h -= p[k] * std::log(p[k]);
        st.entropy += h * inv_n;

        const double v = static_cast<double>(out.value[r]);
        const double verr = v - mb.ret[r];
        st.value_loss += verr * verr * inv_n;

        // policy gradient flows only through the unclipped branch of the min
        const double pol_coef = (surr1 <= surr2) ? -adv * ratio * inv_n : 0.0;
        T *drow = dlogits.data() + static_cast<size_t>(r) * A;
        for (int k = 0; k < A; ++k) {
            const double ind = (k == a) ? 1.0 : 0.0;
            double g = pol_coef * (ind - p[k]);
            if (p[k] > 0.0)
                g += cfg.ent_coef * p[k] * (std::log(p[k]) + h) * inv_n;
            drow[k] = static_cast<T>(g);
        }
        dvalue[r] = static_cast<T>(2.0 * verr * cfg.vf_coef * inv_n);
    }
    st.loss = st.policy_loss + cfg.vf_coef * st.value_loss - cfg.ent_coef * st.entropy;

    if (grads) {
        if (mb.recurrent())
            net.seq_backward_train(params, scache, dlogits.data(), dvalue.data(), *grads);
        else
            net.backward_train(params, fcache, dlogits.data(), dvalue.data(), *grads);
    }
    return st;
}

// DQN regression batch: y holds the (constant) TD targets.
struct QBatch {
    int rows = 0;
    int obs_dim = 0;
    int seq_steps = 0; // 0 means feedforward
    int seq_batch = 0;
    std::vector<float> obs; // flat rows, or step-major [seq_steps][B][obs_dim]
    std::vector<int> actions;
    std::vector<double> y;

    bool recurrent() const { return seq_steps > 0; }
};

// Mean squared TD error on the taken-action Q values; Q is read from the
// actor head, the critic head receives no gradient.
template <typename T>
double dqn_loss_grad(const PolicyNet<T> &net, const ParamsT<T> &params, const QBatch &qb,
                     ParamsT<T> *grads) {
    if (qb.rows < 1 || qb.actions.size() != static_cast<size_t>(qb.rows) ||
        qb.y.size() != static_cast<size_t>(qb.rows))
        throw std::invalid_argument("dqn_loss_grad: bad batch");
    const std::vector<T> obs = detail::to_precision<T>(qb.obs);
    const int A = net.n_actions();

    FwdCache<T> fcache;
    SeqCache<T> scache;
    NetOut<T> out;
    if (qb.recurrent()) {
        Memory<T> mem0 = zero_memory<T>(qb.seq_batch);
        out = net.seq_forward_train(params, obs.data(), qb.seq_steps, qb.seq_batch, mem0,
                                    nullptr, scache);
    } else {
        out = net.forward_train(params, obs.data(), qb.rows, fcache);
    }

    double loss = 0.0;
    std::vector<T> dlogits(static_cast<size_t>(qb.rows) * A, T(0));
    const double inv_n = 1.0 / qb.rows;
    for (int r = 0; r < qb.rows; ++r) {
        const int a = qb.actions[r];
        if (a < 0 || a >= A)
            throw std::invalid_argument("dqn_loss_grad: action out of range");
        const double q = static_cast<double>(out.logits[static_cast<size_t>(r) * A + a]);
        const double err = q - qb.y[r];
        loss += err * err * inv_n;
        dlogits[static_cast<size_t>(r) * A + a] = static_cast<T>(2.0 * err * inv_n);
    }
    if (grads) {
        if (qb.recurrent())
            net.seq_backward_train(params, scache, dlogits.data(), nullptr, *grads);
        else
            net.backward_train(params, fcache, dlogits.data(), nullptr, *grads);
    }
    return loss;
}

} // namespace rfseeker
