// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors

#include "rfseeker/meta_anil.hpp"

#include "rfseeker/categorical.hpp"
#include "rfseeker/eval_report.hpp"
#include "rfseeker/gae.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rfseeker {

void MetaConfig::validate() const {
    if (meta_iters < 1 || tasks_per_batch < 1 || inner_steps < 1 ||
        support_train_steps < 1 || support_eval_episodes < 1 || query_steps < 1 ||
        n_query_episodes < 1)
        throw std::invalid_argument("MetaConfig: non-positive field");
    if (outer_lr <= 0.0 || critic_lr <= 0.0 || inner_lr < 0.0)
        throw std::invalid_argument("MetaConfig: bad learning rate");
    ppo.validate();
}

Scene task_scene(const Scene &base, const TaskSpec &t) {
    Scene s = base;
    s.hall_dims = t.hall_dims;
    for (auto &w : s.wall_reflectivity)
        w = cplx{t.reflectivity, 0.0};
    s.emitter_pos = t.emitter;
    s.validate();
    return s;
}

PolarGrid task_grid(const PolarGrid &base, const Scene &base_scene, const TaskSpec &t) {
    const double jx = t.hall_dims.x / base_scene.hall_dims.x;
    const double jy = t.hall_dims.y / base_scene.hall_dims.y;
    const double jr = std::min(jx, jy);
    PolarGrid g = base;
    g.center = {base.center.x * jx, base.center.y * jy, base.center.z};
    g.ring_spacing_m = base.ring_spacing_m * jr;
    g.r_min_m = base.r_min_m * jr;
    return g;
}

EnvFactory task_env_factory(const MetaContext &ctx, const TaskSpec &t, int instance_base) {
    NavEnvConfig cfg = ctx.base_env;
    cfg.scene = task_scene(ctx.base_env.scene, t);
    cfg.grid = task_grid(ctx.base_env.grid, ctx.base_env.scene, t);
    auto normalizer = ctx.normalizer;
    const uint64_t seed = t.task_seed;
    return [cfg, normalizer, seed, instance_base](int instance) {
        return std::make_unique<NavEnv>(cfg, normalizer, seed,
                                        static_cast<uint64_t>(instance_base + instance));
    };
}

std::vector<TaskSpec> sample_tasks(Rng &rng, int n, const Scene &base) {
    if (n < 1)
        throw std::invalid_argument("sample_tasks: need at least one task");
    std::vector<TaskSpec> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        TaskSpec t;
        t.hall_dims = {base.hall_dims.x * (0.8 + 0.4 * rng.uniform01()),
                       base.hall_dims.y * (0.8 + 0.4 * rng.uniform01()),
                       base.hall_dims.z * (0.8 + 0.4 * rng.uniform01())};
        t.reflectivity = 0.4 + 0.5 * rng.uniform01();
        const double zmax = std::min(2.5, t.hall_dims.z - 0.5);
        t.emitter = {1.0 + (t.hall_dims.x - 2.0) * rng.uniform01(),
                     1.0 + (t.hall_dims.y - 2.0) * rng.uniform01(),
                     0.5 + (zmax - 0.5) * rng.uniform01()};
        t.task_seed = rng.next_u64();
        out.push_back(t);
    }
    return out;
}

namespace {

// whole buffer as one optimization batch, sequence-shaped for recurrent nets
PpoMinibatch buffer_to_minibatch(const PolicyNet<float> &net, const RolloutBuffer &buf,
                                 const std::vector<double> &adv,
                                 const std::vector<double> &ret) {
    PpoMinibatch mb;
    mb.rows = buf.rows();
    mb.obs_dim = buf.obs_dim;
    mb.obs = buf.obs;
    mb.actions = buf.actions;
    mb.logp_old = buf.logp_old;
    mb.adv = adv;
    mb.ret = ret;
    if (net.recurrent()) {
        mb.seq_steps = buf.n_steps;
        mb.seq_batch = buf.n_envs;
        mb.mem_h = buf.mem_h0;
        mb.mem_c = buf.mem_c0;
        mb.carry = buf.carry;
    }
    return mb;
}

PpoMinibatch support_minibatch(const PolicyNet<float> &net, const RolloutBuffer &buf,
                               const PpoConfig &ppo) {
    std::vector<double> adv, ret;
    compute_buffer_gae(buf, ppo.gamma, ppo.gae_lambda, adv, ret);
    normalize_advantages(adv);
    return buffer_to_minibatch(net, buf, adv, ret);
}

double mean_completed_return(const RolloutBuffer &buf, int *episodes = nullptr) {
    if (buf.episode_records.empty()) {
        if (episodes)
            *episodes = 0;
        double sum = 0.0; // no completion: fall back to the partial return
        for (float r : buf.rewards)
            sum += r;
        return sum;
    }
    double sum = 0.0;
    for (const auto &rec : buf.episode_records)
        sum += rec.at("return").get<double>();
    if (episodes)
        *episodes = static_cast<int>(buf.episode_records.size());
    return sum / static_cast<double>(buf.episode_records.size());
}

bool is_head_block(const std::string &name) {
    return name == "actor_head" || name == "critic_head";
}

} // namespace

Params adapt_on_batch(const PolicyNet<float> &net, const Params &params,
                      const PpoMinibatch &batch, double inner_lr,
                      const PpoLossConfig &loss) {
    Params grads = zeros_like(params);
    ppo_loss_grad(net, params, batch, loss, &grads);
    Params adapted = params;
    if (inner_lr == 0.0)
        return adapted;
    const float scale = static_cast<float>(-inner_lr);
    for (size_t b = 0; b < adapted.blocks.size(); ++b) {
        if (!is_head_block(adapted.blocks[b].name))
            continue;
        for (size_t j = 0; j < adapted.blocks[b].tensors.size(); ++j) {
            auto &d = adapted.blocks[b].tensors[j].data;
            const auto &s = grads.blocks[b].tensors[j].data;
            for (size_t k = 0; k < d.size(); ++k)
                d[k] += scale * s[k];
        }
    }
    return adapted;
}

AdaptResult inner_adapt(const PolicyNet<float> &net, const Params &params,
                        const MetaContext &ctx, const TaskSpec &task, const MetaConfig &cfg) {
    Collector col(task_env_factory(ctx, task, kSupportInstanceBase), cfg.ppo.n_envs);
    Rng rng = Rng::stream(task.task_seed, RngStream::action_sample, 0);
    AdaptResult out;
    out.adapted = params;
    const int steps_per_env =
        std::max(1, cfg.support_train_steps / std::max(1, cfg.ppo.n_envs));
    double support_sum = 0.0;
    int support_count = 0;
    for (int k = 0; k < cfg.inner_steps; ++k) {
        RolloutBuffer buf = collect_rollout(net, out.adapted, col, steps_per_env, rng);
        if (k == 0) {
            int eps = 0;
            support_sum = mean_completed_return(buf, &eps);
            support_count = eps;
        }
        out.adapted = adapt_on_batch(net, out.adapted, support_minibatch(net, buf, cfg.ppo),
                                     cfg.inner_lr, cfg.ppo.loss());
    }
    out.support_mean_return = support_sum;
    out.support_episodes = support_count;
    return out;
}

TaskQueryResult task_query_grad(const PolicyNet<float> &net, const Params &params,
                                const MetaContext &ctx, const TaskSpec &task,
                                const MetaConfig &cfg) {
    AdaptResult ar = inner_adapt(net, params, ctx, task, cfg);

    Collector qcol(task_env_factory(ctx, task, kQueryInstanceBase), cfg.ppo.n_envs);
    Rng qrng = Rng::stream(task.task_seed, RngStream::action_sample, 1);
    const int steps_per_env = std::max(1, cfg.query_steps / std::max(1, cfg.ppo.n_envs));
    RolloutBuffer qbuf = collect_rollout(net, ar.adapted, qcol, steps_per_env, qrng);

    TaskQueryResult out;
    out.grads = zeros_like(params);
    PpoLossStats ls = ppo_loss_grad(net, ar.adapted, support_minibatch(net, qbuf, cfg.ppo),
                                    cfg.ppo.loss(), &out.grads);
    out.query_loss = ls.loss;
    out.query_mean_return = mean_completed_return(qbuf);
    out.support_mean_return = ar.support_mean_return;
    return out;
}

OuterStats fomaml_outer_step(const PolicyNet<float> &net, Params &params,
                             AdamState<float> &opt, const MetaContext &ctx,
                             const std::vector<TaskSpec> &tasks, const MetaConfig &cfg) {
    if (tasks.empty())
        throw std::invalid_argument("fomaml_outer_step: empty task batch");
    OuterStats st;
    Params outer = zeros_like(params);
    double support_mean = 0.0;
    for (const TaskSpec &task : tasks) {
        TaskQueryResult q = task_query_grad(net, params, ctx, task, cfg);
        add_scaled(outer, q.grads, 1.0f);
        st.per_task_returns.push_back(q.query_mean_return);
        st.mean_query_return += q.query_mean_return;
        st.query_loss += q.query_loss;
        support_mean += q.support_mean_return;
    }
    const double inv = 1.0 / static_cast<double>(tasks.size());
    for (auto &blk : outer.blocks)
        for (auto &t : blk.tensors)
            for (auto &v : t.data)
                v = static_cast<float>(v * inv);
    st.mean_query_return *= inv;
    st.query_loss *= inv;
    st.adaptation_gain = st.mean_query_return - support_mean * inv;

    if (!params_finite(outer))
        return st; // rejected outer step
    st.grad_norm = clip_global_norm(outer, cfg.ppo.max_grad_norm);
    std::vector<double> block_lr;
    for (const auto &blk : params.blocks)
        block_lr.push_back(blk.name == "critic_head" ? cfg.critic_lr : cfg.outer_lr);
    adam_update(params, outer, opt, block_lr);
    return st;
}

namespace {

// single-env episodic collection for evaluation-time adaptation
RolloutBuffer collect_episodes(const PolicyNet<float> &net, const Params &params,
                               const EnvFactory &factory, int n_episodes, Rng &rng,
                               double *mean_return) {
    std::unique_ptr<NavEnv> env = factory(0);
    const int A = net.n_actions();
    Memory<float> mem = zero_memory<float>(1);
    std::vector<float> obs_rows;
    std::vector<int> actions;
    std::vector<double> logps, values;
    std::vector<float> rewards, carries;
    std::vector<uint8_t> dones;
    double ret_sum = 0.0;

    for (int ep = 0; ep < n_episodes; ++ep) {
        Observation o = env->reset();
        std::vector<float> cur = std::move(o.data);
        mem = zero_memory<float>(1);
        bool first = true;
        double ep_ret = 0.0;
        while (true) {
            carries.push_back(first ? 0.0f : 1.0f);
            first = false;
            obs_rows.insert(obs_rows.end(), cur.begin(), cur.end());
            NetOut<float> out =
                net.forward(params, cur.data(), 1, net.recurrent() ? &mem : nullptr);
            CategoricalOut pick = categorical_sample(out.logits.data(), A, rng);
            actions.push_back(pick.action);
            logps.push_back(pick.log_prob);
            values.push_back(static_cast<double>(out.value[0]));
            StepResult sr = env->step(static_cast<Action>(pick.action));
            rewards.push_back(static_cast<float>(sr.reward));
            dones.push_back(sr.done ? 1 : 0);
            ep_ret += sr.reward;
            if (sr.done)
                break;
            cur = std::move(sr.obs.data);
        }
        ret_sum += ep_ret;
    }

    RolloutBuffer buf;
    buf.n_envs = 1;
    buf.n_steps = static_cast<int>(actions.size());
    buf.obs_dim = static_cast<int>(obs_rows.size() / actions.size());
    buf.obs = std::move(obs_rows);
    buf.actions = std::move(actions);
    buf.logp_old = std::move(logps);
    buf.values = std::move(values);
    buf.rewards = std::move(rewards);
    buf.dones = std::move(dones);
    buf.carry = std::move(carries);
    if (net.recurrent()) {
        buf.mem_h0.assign(mem.h.size(), 0.0f);
        buf.mem_c0.assign(mem.c.size(), 0.0f);
    }
    buf.bootstrap.assign(1, 0.0); // last row is always terminal
    if (mean_return)
        *mean_return = ret_sum / n_episodes;
    return buf;
}

} // namespace

MetaEvalResult meta_eval(const PolicyNet<float> &net, const Params &params,
                         const MetaContext &ctx, const TaskSpec &task, const MetaConfig &cfg) {
    MetaEvalResult out;
    Rng srng = Rng::stream(task.task_seed, RngStream::action_sample, 2);
    double support_mean = 0.0;
    RolloutBuffer sbuf =
        collect_episodes(net, params, task_env_factory(ctx, task, kEvalSupportInstanceBase),
                         cfg.support_eval_episodes, srng, &support_mean);
    out.zero_shot_return_undiscounted = support_mean;
    out.support_episodes = cfg.support_eval_episodes;

    Params adapted = params;
    PpoMinibatch mb = support_minibatch(net, sbuf, cfg.ppo);
    for (int k = 0; k < cfg.inner_steps; ++k)
        adapted = adapt_on_batch(net, adapted, mb, cfg.inner_lr, cfg.ppo.loss());

    std::unique_ptr<NavEnv> qenv = task_env_factory(ctx, task, kEvalQueryInstanceBase)(0);
    Rng qrng = Rng::stream(task.task_seed, RngStream::eval, 0);
    std::vector<EpisodeStats> stats =
        run_eval(net, adapted, *qenv, cfg.n_query_episodes, cfg.ppo.gamma, false, qrng);
    for (const auto &s : stats) {
        out.query_return_undiscounted += s.return_undiscounted;
        out.query_return_discounted += s.return_discounted;
    }
    out.query_return_undiscounted /= cfg.n_query_episodes;
    out.query_return_discounted /= cfg.n_query_episodes;
    out.query_episodes = cfg.n_query_episodes;
    return out;
}

MetaTrainResult meta_train(const MetaContext &ctx, Arch arch, const MetaConfig &cfg,
                           uint64_t seed, const TrainHooks &hooks, const TrainStart *start) {
    cfg.validate();
    const int obs_dim =
        observation_size(ctx.base_env.mode, ctx.base_env.feature);
    PolicyNet<float> net(arch, obs_dim);
    Rng init_rng = Rng::stream(seed, RngStream::weight_init);
    Params params = net.init_params(init_rng);
    int first_iter = 1;
    if (start) {
        if (start->params.arch != arch || start->params.obs_dim != obs_dim)
            throw std::invalid_argument("meta_train: resume checkpoint does not match this run");
        if (start->steps < 0)
            throw std::invalid_argument("meta_train: resume iteration count must be non-negative");
        params = start->params;
        first_iter = static_cast<int>(start->steps) + 1;
    }
    AdamState<float> opt = start ? start->opt : make_adam_state(params);
    Rng task_rng = Rng::stream(seed, RngStream::meta_task);
    // Burn the task batches the previous run already consumed so a resumed
    // run sees the same task sequence an uninterrupted run would.
    for (int it = 1; it < first_iter && it <= cfg.meta_iters; ++it)
        sample_tasks(task_rng, cfg.tasks_per_batch, ctx.base_env.scene);

    for (int it = first_iter; it <= cfg.meta_iters; ++it) {
        std::vector<TaskSpec> tasks =
            sample_tasks(task_rng, cfg.tasks_per_batch, ctx.base_env.scene);
        OuterStats st = fomaml_outer_step(net, params, opt, ctx, tasks, cfg);
        if (hooks.on_metric)
            hooks.on_metric({{"type", "meta"},
                             {"meta_iter", it},
                             {"mean_query_return", st.mean_query_return},
                             {"per_task_returns", st.per_task_returns},
                             {"adaptation_gain", st.adaptation_gain},
                             {"query_loss", st.query_loss},
                             {"grad_norm", st.grad_norm}});
        if (hooks.on_checkpoint && cfg.checkpoint_every > 0 &&
            it % cfg.checkpoint_every == 0)
            hooks.on_checkpoint(it, params, opt);
    }
    MetaTrainResult out;
    out.params = std::move(params);
    out.opt = std::move(opt);
    out.meta_iters = std::max<int64_t>(first_iter - 1, cfg.meta_iters);
    return out;
}

} // namespace rfseeker
