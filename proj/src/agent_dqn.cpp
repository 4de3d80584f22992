// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors

#include "rfseeker/agent_dqn.hpp"

#include "rfseeker/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rfseeker {

void DqnConfig::validate() const {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw std::invalid_argument("DqnConfig: gamma must be in (0,1)");
    if (!(eps_end < eps_start))
        throw std::invalid_argument("DqnConfig: eps_end must be below eps_start");
    if (lr <= 0.0 || target_sync_every < 1 || update_every < 1 || learn_start < 0 ||
        total_steps < 1 || batch_size < 1 || replay_capacity < 1 || seq_len < 1)
        throw std::invalid_argument("DqnConfig: non-positive field");
    if (eps_decay_fraction <= 0.0 || eps_decay_fraction > 1.0)
        throw std::invalid_argument("DqnConfig: eps_decay_fraction must be in (0,1]");
}

int select_action(const PolicyNet<float> &net, const Params &params,
                  const std::vector<float> &obs, Memory<float> *mem, double eps, Rng &rng) {
    NetOut<float> out = net.forward(params, obs.data(), 1, net.recurrent() ? mem : nullptr);
    if (rng.uniform01() < eps)
        return static_cast<int>(rng.uniform_int(net.n_actions()));
    return argmax_index(out.logits.data(), net.n_actions());
}

std::vector<double> td_targets(const PolicyNet<float> &net, const Params &target_params,
                               const TransitionBatch &batch, double gamma) {
    NetOut<float> out = net.forward(target_params, batch.next_obs.data(), batch.batch);
    std::vector<double> y(batch.batch);
    const int A = net.n_actions();
    for (int b = 0; b < batch.batch; ++b) {
        double best = out.logits[static_cast<size_t>(b) * A];
        for (int a = 1; a < A; ++a)
            best = std::max(best, static_cast<double>(out.logits[static_cast<size_t>(b) * A + a]));
        y[b] = batch.rewards[b] + (batch.dones[b] ? 0.0 : gamma * best);
    }
    return y;
}

std::vector<double> td_targets_seq(const PolicyNet<float> &net, const Params &target_params,
                                   const SequenceBatch &batch, double gamma) {
    const int T = batch.seq_len, B = batch.batch, A = net.n_actions();
    std::vector<double> y(static_cast<size_t>(T) * B);
    Memory<float> mem = zero_memory<float>(B);
    for (int k = 1; k <= T; ++k) {
        const float *step_obs =
            batch.obs.data() + static_cast<size_t>(k) * B * batch.obs_dim;
        NetOut<float> out = net.forward(target_params, step_obs, B,
                                        net.recurrent() ? &mem : nullptr);
        for (int b = 0; b < B; ++b) {
            double best = out.logits[static_cast<size_t>(b) * A];
            for (int a = 1; a < A; ++a)
                best = std::max(best,
                                static_cast<double>(out.logits[static_cast<size_t>(b) * A + a]));
            const size_t row = static_cast<size_t>(k - 1) * B + b;
            y[row] = batch.rewards[row] + (batch.dones[row] ? 0.0 : gamma * best);
        }
    }
    return y;
}

namespace {

DqnUpdateStats apply_q_update(const PolicyNet<float> &net, Params &params, const QBatch &qb,
                              AdamState<float> &opt, double lr) {
    Params grads = zeros_like(params);
    const double loss = dqn_loss_grad(net, params, qb, &grads);
    DqnUpdateStats st;
    st.loss = loss;
    if (!std::isfinite(loss) || !params_finite(grads))
        return st; // rejected, parameters untouched
    adam_update(params, grads, opt, lr);
    st.applied = true;
    return st;
}

} // namespace

DqnUpdateStats dqn_update(const PolicyNet<float> &net, Params &params,
                          const Params &target_params, const TransitionBatch &batch,
                          AdamState<float> &opt, const DqnConfig &cfg) {
    QBatch qb;
    qb.rows = batch.batch;
    qb.obs_dim = batch.obs_dim;
    qb.obs = batch.obs;
    qb.actions = batch.actions;
    qb.y = td_targets(net, target_params, batch, cfg.gamma);
    return apply_q_update(net, params, qb, opt, cfg.lr);
}

DqnUpdateStats dqn_update_seq(const PolicyNet<float> &net, Params &params,
                              const Params &target_params, const SequenceBatch &batch,
                              AdamState<float> &opt, const DqnConfig &cfg) {
    QBatch qb;
    qb.rows = batch.seq_len * batch.batch;
    qb.obs_dim = batch.obs_dim;
    qb.seq_steps = batch.seq_len;
    qb.seq_batch = batch.batch;
    // learner window: the first seq_len steps of the stored seq_len+1
    qb.obs.assign(batch.obs.begin(),
                  batch.obs.begin() +
                      static_cast<size_t>(batch.seq_len) * batch.batch * batch.obs_dim);
    qb.actions = batch.actions;
    qb.y = td_targets_seq(net, target_params, batch, cfg.gamma);
    return apply_q_update(net, params, qb, opt, cfg.lr);
}

TrainResult train_dqn(const EnvFactory &env_factory, Arch arch, const DqnConfig &cfg,
                      uint64_t seed, const TrainHooks &hooks, const TrainStart *start) {
    cfg.validate();
    const bool recurrent = arch == Arch::recurrent_raw;
    if (recurrent != (cfg.seq_len > 1))
        throw std::invalid_argument("train_dqn: seq_len must match the architecture");

    std::unique_ptr<NavEnv> env = env_factory(0);
    Observation obs0 = env->reset();
    const int obs_dim = static_cast<int>(obs0.data.size());

    PolicyNet<float> net(arch, obs_dim);
    Rng init_rng = Rng::stream(seed, RngStream::weight_init);
    Params params = net.init_params(init_rng);
    int64_t first_step = 0;
    if (start) {
        if (start->params.arch != arch || start->params.obs_dim != obs_dim)
            throw std::invalid_argument("train_dqn: resume checkpoint does not match this run");
        if (start->steps < 0)
            throw std::invalid_argument("train_dqn: resume step count must be non-negative");
        params = start->params;
        first_step = start->steps;
    }
    Params target = params;
    AdamState<float> opt = start ? start->opt : make_adam_state(params);
    Rng explore_rng = Rng::stream(seed, RngStream::epsilon);
    Rng replay_rng = Rng::stream(seed, RngStream::replay_sample);

    ReplayBuffer replay(cfg.replay_capacity, obs_dim, cfg.seq_len);
    replay.begin_episode(obs0.data);
    Memory<float> mem = zero_memory<float>(1);
    std::vector<float> cur = std::move(obs0.data);

    TrainResult result{params, opt, 0, 0};
    double ep_return = 0.0;
    int ep_len = 0;
    double last_loss = 0.0;
    bool any_update = false;

    for (int64_t step = first_step; step < cfg.total_steps; ++step) {
        const double eps = epsilon_at(step, cfg.eps_start, cfg.eps_end,
                                      cfg.eps_decay_fraction, cfg.total_steps);
        const int action = select_action(net, params, cur, &mem, eps, explore_rng);
        StepResult sr = env->step(static_cast<Action>(action));
        replay.push(sr.obs.data, action, static_cast<float>(sr.reward), sr.done);
        ep_return += sr.reward;
        ++ep_len;
        const int64_t done_steps = step + 1;

        if (done_steps >= cfg.learn_start && done_steps % cfg.update_every == 0) {
            if (cfg.seq_len == 1 && replay.size() >= cfg.batch_size) {
                TransitionBatch batch = replay.sample_transitions(cfg.batch_size, replay_rng);
                DqnUpdateStats st = dqn_update(net, params, target, batch, opt, cfg);
                last_loss = st.loss;
                any_update = true;
            } else if (cfg.seq_len > 1 && replay.n_sequences() >= cfg.batch_size) {
                SequenceBatch batch = replay.sample_sequences(cfg.batch_size, replay_rng);
                DqnUpdateStats st = dqn_update_seq(net, params, target, batch, opt, cfg);
                last_loss = st.loss;
                any_update = true;
            }
        }
        if (done_steps % cfg.target_sync_every == 0)
            target = params;

        if (sr.done) {
            ++result.episodes;
            if (hooks.on_metric) {
                nlohmann::json rec{{"type", "episode"},
                                   {"step", done_steps},
                                   {"episode", result.episodes},
                                   {"return", ep_return},
                                   {"length", ep_len},
                                   {"success", sr.success},
                                   {"epsilon", eps}};
                rec["loss"] = any_update ? nlohmann::json(last_loss) : nlohmann::json();
                hooks.on_metric(rec);
            }
            ep_return = 0.0;
            ep_len = 0;
            Observation o = env->reset();
            cur = std::move(o.data);
            replay.begin_episode(cur);
            mem = zero_memory<float>(1);
        } else {
            cur = std::move(sr.obs.data);
        }

        if (hooks.snapshot && cfg.snapshot_every > 0 && done_steps % cfg.snapshot_every == 0 &&
            hooks.on_metric) {
            nlohmann::json snap = hooks.snapshot(params, done_steps);
            snap["type"] = "snapshot";
            snap["step"] = done_steps;
            hooks.on_metric(snap);
        }
        if (hooks.on_checkpoint && cfg.checkpoint_every > 0 &&
            done_steps % cfg.checkpoint_every == 0)
            hooks.on_checkpoint(done_steps, params, opt);
    }

    result.params = std::move(params);
    result.opt = std::move(opt);
    result.steps = std::max(first_step, cfg.total_steps);
    return result;
}

} // namespace rfseeker
