// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors

#include "rfseeker/agent_ppo.hpp"

#include "rfseeker/eval_report.hpp"
#include "rfseeker/gae.hpp"
#include "rfseeker/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rfseeker {

void PpoConfig::validate() const {
    if (n_envs < 1 || minibatch < 1 || epochs < 1 || rollout_steps < 1 || total_steps < 1)
        throw std::invalid_argument("PpoConfig: non-positive field");
    if (!(clip > 0.0 && clip < 1.0))
        throw std::invalid_argument("PpoConfig: clip must be in (0,1)");
    if (!(gae_lambda > 0.0 && gae_lambda <= 1.0))
        throw std::invalid_argument("PpoConfig: gae_lambda must be in (0,1]");
    if (!(gamma > 0.0 && gamma <= 1.0))
        throw std::invalid_argument("PpoConfig: gamma must be in (0,1]");
    if (lr <= 0.0 || ent_coef < 0.0 || vf_coef < 0.0 || max_grad_norm <= 0.0)
        throw std::invalid_argument("PpoConfig: bad coefficient");
    if (minibatch > n_envs * rollout_steps)
        throw std::invalid_argument("PpoConfig: minibatch larger than the rollout");
}

Collector::Collector(const EnvFactory &factory, int n_envs) {
    if (n_envs < 1)
        throw std::invalid_argument("Collector: need at least one env");
    envs.reserve(n_envs);
    for (int e = 0; e < n_envs; ++e) {
        envs.push_back(factory(e));
        Observation o = envs.back()->reset();
        cur_obs.push_back(std::move(o.data));
    }
    mem = zero_memory<float>(n_envs);
    episode_start.assign(n_envs, 1);
    ep_return.assign(n_envs, 0.0);
    ep_len.assign(n_envs, 0);
}

RolloutBuffer collect_rollout(const PolicyNet<float> &net, const Params &params,
                              Collector &col, int n_steps, Rng &rng) {
    const int N = static_cast<int>(col.envs.size());
    const int D = static_cast<int>(col.cur_obs[0].size());
    const int A = net.n_actions();
    RolloutBuffer buf;
    buf.n_envs = N;
    buf.n_steps = n_steps;
    buf.obs_dim = D;
    buf.obs.resize(static_cast<size_t>(n_steps) * N * D);
    buf.actions.resize(static_cast<size_t>(n_steps) * N);
    buf.logp_old.resize(static_cast<size_t>(n_steps) * N);
    buf.values.resize(static_cast<size_t>(n_steps) * N);
    buf.rewards.resize(static_cast<size_t>(n_steps) * N);
    buf.dones.resize(static_cast<size_t>(n_steps) * N);
    buf.carry.resize(static_cast<size_t>(n_steps) * N);
    if (net.recurrent()) {
        buf.mem_h0 = col.mem.h;
        buf.mem_c0 = col.mem.c;
    }

    std::vector<float> step_obs(static_cast<size_t>(N) * D);
    for (int t = 0; t < n_steps; ++t) {
        for (int e = 0; e < N; ++e) {
            buf.carry[static_cast<size_t>(t) * N + e] = col.episode_start[e] ? 0.0f : 1.0f;
            std::copy(col.cur_obs[e].begin(), col.cur_obs[e].end(),
                      step_obs.begin() + static_cast<size_t>(e) * D);
        }
        std::copy(step_obs.begin(), step_obs.end(),
                  buf.obs.begin() + static_cast<size_t>(t) * N * D);
        if (net.recurrent())
            for (int e = 0; e < N; ++e)
                if (col.episode_start[e])
                    reset_memory_row(col.mem, e);
        NetOut<float> out = net.forward(params, step_obs.data(), N,
                                        net.recurrent() ? &col.mem : nullptr);
        for (int e = 0; e < N; ++e) {
            const size_t row = static_cast<size_t>(t) * N + e;
            CategoricalOut pick =
                categorical_sample(out.logits.data() + static_cast<size_t>(e) * A, A, rng);
            buf.actions[row] = pick.action;
            buf.logp_old[row] = pick.log_prob;
            buf.values[row] = static_cast<double>(out.value[e]);

            StepResult sr = col.envs[e]->step(static_cast<Action>(pick.action));
            buf.rewards[row] = static_cast<float>(sr.reward);
            buf.dones[row] = sr.done ? 1 : 0;
            col.ep_return[e] += sr.reward;
            ++col.ep_len[e];
            ++col.steps;
            if (sr.done) {
                ++col.episodes;
                buf.episode_records.push_back({{"type", "episode"},
                                               {"step", col.steps},
                                               {"episode", col.episodes},
                                               {"return", col.ep_return[e]},
                                               {"length", col.ep_len[e]},
                                               {"success", sr.success}});
                col.ep_return[e] = 0.0;
                col.ep_len[e] = 0;
                Observation o = col.envs[e]->reset();
                col.cur_obs[e] = std::move(o.data);
                col.episode_start[e] = 1;
                if (net.recurrent())
                    reset_memory_row(col.mem, e);
            } else {
                col.cur_obs[e] = std::move(sr.obs.data);
                col.episode_start[e] = 0;
            }
        }
    }

    // bootstrap values from a scratch copy so the live memory stays aligned
    // with the next rollout's first step
    for (int e = 0; e < N; ++e)
        std::copy(col.cur_obs[e].begin(), col.cur_obs[e].end(),
                  step_obs.begin() + static_cast<size_t>(e) * D);
    Memory<float> boot_mem = col.mem;
    if (net.recurrent())
        for (int e = 0; e < N; ++e)
            if (col.episode_start[e])
                reset_memory_row(boot_mem, e);
    NetOut<float> out = net.forward(params, step_obs.data(), N,
                                    net.recurrent() ? &boot_mem : nullptr);
    buf.bootstrap.assign(N, 0.0);
    for (int e = 0; e < N; ++e)
        buf.bootstrap[e] = static_cast<double>(out.value[e]);
    return buf;
}

void compute_buffer_gae(const RolloutBuffer &buf, double gamma, double lam,
                        std::vector<double> &advantages, std::vector<double> &returns) {
    const int T = buf.n_steps, N = buf.n_envs;
    advantages.assign(static_cast<size_t>(T) * N, 0.0);
    returns.assign(static_cast<size_t>(T) * N, 0.0);
    std::vector<double> r(T), v(T);
    std::vector<uint8_t> d(T);
    for (int e = 0; e < N; ++e) {
        for (int t = 0; t < T; ++t) {
            const size_t row = static_cast<size_t>(t) * N + e;
            r[t] = buf.rewards[row];
            v[t] = buf.values[row];
            d[t] = buf.dones[row];
        }
        GaeResult g = compute_gae(r, v, d, buf.bootstrap[e], gamma, lam);
        for (int t = 0; t < T; ++t) {
            const size_t row = static_cast<size_t>(t) * N + e;
            advantages[row] = g.advantages[t];
            returns[row] = g.returns[t];
        }
    }
}

namespace {

// gather flat sample rows into a feedforward minibatch
PpoMinibatch gather_rows(const RolloutBuffer &buf, const std::vector<double> &adv,
                         const std::vector<double> &ret, const std::vector<int> &idx,
                         size_t begin, size_t count) {
    PpoMinibatch mb;
    mb.rows = static_cast<int>(count);
    mb.obs_dim = buf.obs_dim;
    mb.obs.resize(count * buf.obs_dim);
    mb.actions.resize(count);
    mb.logp_old.resize(count);
    mb.adv.resize(count);
    mb.ret.resize(count);
    for (size_t k = 0; k < count; ++k) {
        const int row = idx[begin + k];
        std::copy(buf.obs.begin() + static_cast<size_t>(row) * buf.obs_dim,
                  buf.obs.begin() + static_cast<size_t>(row + 1) * buf.obs_dim,
                  mb.obs.begin() + k * buf.obs_dim);
        mb.actions[k] = buf.actions[row];
        mb.logp_old[k] = buf.logp_old[row];
        mb.adv[k] = adv[row];
        mb.ret[k] = ret[row];
    }
    return mb;
}

// gather whole env columns into a sequence minibatch
PpoMinibatch gather_seqs(const RolloutBuffer &buf, const std::vector<double> &adv,
                         const std::vector<double> &ret, const std::vector<int> &env_ids,
                         size_t begin, size_t count, int hidden) {
    const int T = buf.n_steps, N = buf.n_envs, D = buf.obs_dim;
    PpoMinibatch mb;
    mb.seq_steps = T;
    mb.seq_batch = static_cast<int>(count);
    mb.rows = T * mb.seq_batch;
    mb.obs_dim = D;
    mb.obs.resize(static_cast<size_t>(mb.rows) * D);
    mb.actions.resize(mb.rows);
    mb.logp_old.resize(mb.rows);
    mb.adv.resize(mb.rows);
    mb.ret.resize(mb.rows);
    mb.carry.resize(mb.rows);
    mb.mem_h = std::vector<float>(count * static_cast<size_t>(hidden));
    mb.mem_c = std::vector<float>(count * static_cast<size_t>(hidden));
    for (size_t k = 0; k < count; ++k) {
        const int e = env_ids[begin + k];
        std::copy(buf.mem_h0.begin() + static_cast<size_t>(e) * hidden,
                  buf.mem_h0.begin() + static_cast<size_t>(e + 1) * hidden,
                  mb.mem_h.begin() + k * hidden);
        std::copy(buf.mem_c0.begin() + static_cast<size_t>(e) * hidden,
                  buf.mem_c0.begin() + static_cast<size_t>(e + 1) * hidden,
                  mb.mem_c.begin() + k * hidden);
        for (int t = 0; t < T; ++t) {
            const size_t src = static_cast<size_t>(t) * N + e;
            const size_t dst = static_cast<size_t>(t) * count + k;
            std::copy(buf.obs.begin() + src * D, buf.obs.begin() + (src + 1) * D,
                      mb.obs.begin() + dst * D);
            mb.actions[dst] = buf.actions[src];
            mb.logp_old[dst] = buf.logp_old[src];
            mb.adv[dst] = adv[src];
            mb.ret[dst] = ret[src];
            mb.carry[dst] = buf.carry[src];
        }
    }
    return mb;
}

template <typename IntVec> void shuffle_ids(IntVec &v, Rng &rng) {
    for (size_t i = v.size(); i > 1; --i) {
        const size_t j = rng.uniform_int(i);
        std::swap(v[i - 1], v[j]);
    }
}

} // namespace

PpoUpdateStats ppo_update(const PolicyNet<float> &net, Params &params,
                          const RolloutBuffer &buf, AdamState<float> &opt,
                          const PpoConfig &cfg, double lr_now, Rng &shuffle_rng) {
    std::vector<double> adv, ret;
    compute_buffer_gae(buf, cfg.gamma, cfg.gae_lambda, adv, ret);

    PpoUpdateStats st;
    st.ev = buf.rows() >= 2 ? explained_variance(buf.values, ret) : std::nullopt;
    st.lr = lr_now;
    normalize_advantages(adv);

    Params grads = zeros_like(params);
    bool first = true;
    auto run_minibatch = [&](const PpoMinibatch &mb) {
        fill_zero(grads);
        PpoLossStats ls = ppo_loss_grad(net, params, mb, cfg.loss(), &grads);
        if (!std::isfinite(ls.loss) || !params_finite(grads))
            return; // rejected update, parameters untouched
        clip_global_norm(grads, cfg.max_grad_norm);
        adam_update(params, grads, opt, lr_now);
        st.loss += ls.loss;
        st.policy_loss += ls.policy_loss;
        st.value_loss += ls.value_loss;
        st.entropy += ls.entropy;
        st.clip_frac += ls.clip_frac;
        if (first) {
            st.clip_frac_first = ls.clip_frac;
            first = false;
        }
        ++st.minibatches;
    };

    if (!net.recurrent()) {
        std::vector<int> idx(buf.rows());
        std::iota(idx.begin(), idx.end(), 0);
        for (int ep = 0; ep < cfg.epochs; ++ep) {
            shuffle_ids(idx, shuffle_rng);
            for (size_t pos = 0; pos + cfg.minibatch <= idx.size();
                 pos += static_cast<size_t>(cfg.minibatch))
                run_minibatch(gather_rows(buf, adv, ret, idx, pos, cfg.minibatch));
        }
    } else {
        const int hidden = static_cast<int>(buf.mem_h0.size() / buf.n_envs);
        const size_t seqs_per_mb =
            std::max<size_t>(1, static_cast<size_t>(cfg.minibatch) / buf.n_steps);
        std::vector<int> env_ids(buf.n_envs);
        std::iota(env_ids.begin(), env_ids.end(), 0);
        for (int ep = 0; ep < cfg.epochs; ++ep) {
            shuffle_ids(env_ids, shuffle_rng);
            for (size_t pos = 0; pos < env_ids.size(); pos += seqs_per_mb) {
                const size_t count = std::min(seqs_per_mb, env_ids.size() - pos);
                run_minibatch(gather_seqs(buf, adv, ret, env_ids, pos, count, hidden));
            }
        }
    }

    if (st.minibatches > 0) {
        st.loss /= st.minibatches;
        st.policy_loss /= st.minibatches;
        st.value_loss /= st.minibatches;
        st.entropy /= st.minibatches;
        st.clip_frac /= st.minibatches;
    }
    return st;
}

TrainResult train_ppo(const EnvFactory &env_factory, Arch arch, const PpoConfig &cfg,
                      uint64_t seed, const TrainHooks &hooks, const TrainStart *start) {
    cfg.validate();
    Collector col(env_factory, cfg.n_envs);
    const int obs_dim = static_cast<int>(col.cur_obs[0].size());
    PolicyNet<float> net(arch, obs_dim);

    Rng init_rng = Rng::stream(seed, RngStream::weight_init);
    Params params = net.init_params(init_rng);
    int64_t base_steps = 0;
    if (start) {
        if (start->params.arch != arch || start->params.obs_dim != obs_dim)
            throw std::invalid_argument("train_ppo: resume checkpoint does not match this run");
        if (start->steps < 0)
            throw std::invalid_argument("train_ppo: resume step count must be non-negative");
        params = start->params;
        base_steps = start->steps;
    }
    AdamState<float> opt = start ? start->opt : make_adam_state(params);
    Rng action_rng = Rng::stream(seed, RngStream::action_sample);
    Rng shuffle_rng = Rng::stream(seed, RngStream::shuffle);

    std::deque<bool> success_window;
    std::deque<double> return_window;
    int64_t update_idx = 0;
    int64_t next_snapshot = cfg.snapshot_every;
    int64_t next_checkpoint = cfg.checkpoint_every;
    if (base_steps > 0 && cfg.snapshot_every > 0)
        next_snapshot = (base_steps / cfg.snapshot_every + 1) * cfg.snapshot_every;
    if (base_steps > 0 && cfg.checkpoint_every > 0)
        next_checkpoint = (base_steps / cfg.checkpoint_every + 1) * cfg.checkpoint_every;

    while (base_steps + col.steps < cfg.total_steps) {
        const int64_t seen = base_steps + col.steps;
        const double lr_now =
            cfg.anneal_lr ? annealed_lr(cfg.lr, seen, cfg.total_steps) : cfg.lr;
        RolloutBuffer buf = collect_rollout(net, params, col, cfg.rollout_steps, action_rng);
        for (const auto &rec : buf.episode_records) {
            success_window.push_back(rec.at("success").get<bool>());
            return_window.push_back(rec.at("return").get<double>());
            if (success_window.size() > 100) {
                success_window.pop_front();
                return_window.pop_front();
            }
            if (hooks.on_metric)
                hooks.on_metric(rec);
        }
        PpoUpdateStats st = ppo_update(net, params, buf, opt, cfg, lr_now, shuffle_rng);
        ++update_idx;
        if (hooks.on_metric) {
            double sr = 0.0, mean_ret = 0.0;
            if (!success_window.empty()) {
                for (bool s : success_window)
                    sr += s ? 1.0 : 0.0;
                sr /= static_cast<double>(success_window.size());
                for (double g : return_window)
                    mean_ret += g;
                mean_ret /= static_cast<double>(return_window.size());
            }
            nlohmann::json rec{{"type", "update"},
                               {"update", update_idx},
                               {"step", base_steps + col.steps},
                               {"mean_return", mean_ret},
                               {"success_rate_window", sr},
                               {"entropy", st.entropy},
                               {"clip_frac", st.clip_frac},
                               {"clip_frac_first", st.clip_frac_first},
                               {"loss", st.loss},
                               {"value_loss", st.value_loss},
                               {"policy_loss", st.policy_loss},
                               {"lr", st.lr}};
            rec["ev"] = st.ev ? nlohmann::json(*st.ev) : nlohmann::json();
            hooks.on_metric(rec);
        }
        const int64_t done = base_steps + col.steps;
        if (hooks.snapshot && cfg.snapshot_every > 0 && done >= next_snapshot &&
            hooks.on_metric) {
            nlohmann::json snap = hooks.snapshot(params, done);
            snap["type"] = "snapshot";
            snap["step"] = done;
            hooks.on_metric(snap);
            next_snapshot += cfg.snapshot_every;
        }
        if (hooks.on_checkpoint && cfg.checkpoint_every > 0 && done >= next_checkpoint) {
            hooks.on_checkpoint(done, params, opt);
            next_checkpoint += cfg.checkpoint_every;
        }
    }

    TrainResult result;
    result.params = std::move(params);
    result.opt = std::move(opt);
    result.episodes = col.episodes;
    result.steps = base_steps + col.steps;
    return result;
}

} // namespace rfseeker
