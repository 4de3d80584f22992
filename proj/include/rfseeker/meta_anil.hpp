// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors

#pragma once

#include "rfseeker/agent_ppo.hpp"

#include <vector>

namespace rfseeker {

// Scene-variant task: reflectivity and hall size reshape propagation, the
// emitter field sets the transmitter height (its xy is re-anchored to the
// sampled goal cell every episode by the nav task itself).
struct TaskSpec {
    Vec3 emitter;
    double reflectivity = 0.7;
    Vec3 hall_dims;
    uint64_t task_seed = 0;
};

struct MetaConfig {
    int meta_iters = 2000;
    int tasks_per_batch = 3;
    double outer_lr = 1e-4;  // Adam rate for encoder/lstm/actor_head
    double critic_lr = 1e-4; // Adam rate for the critic head
    double inner_lr = 3e-3;  // plain-GD rate for the heads-only inner step
    int inner_steps = 1;
    int support_train_steps = 128;
    int support_eval_episodes = 5;
    int query_steps = 128;
    int n_query_episodes = 20;
    int64_t checkpoint_every = 0; // meta iterations, 0 disables
    PpoConfig ppo;                // loss/GAE coefficients; n_envs applies to rollouts

    void validate() const;
    static MetaConfig defaults() {
        MetaConfig c;
        c.ppo.n_envs = 1;
        c.ppo.vf_coef = 0.4;
        return c;
    }
};

// Env instance bases keep support, query, and evaluation rollouts on
// disjoint RNG streams within one task.
inline constexpr int kSupportInstanceBase = 0;
inline constexpr int kQueryInstanceBase = 100;
inline constexpr int kEvalSupportInstanceBase = 200;
inline constexpr int kEvalQueryInstanceBase = 300;

// Everything needed to stand up envs for a task.
struct MetaContext {
    NavEnvConfig base_env;
    std::shared_ptr<const Normalizer> normalizer;
};

Scene task_scene(const Scene &base, const TaskSpec &t);

// The grid follows the hall: center scales per axis, radii scale by the
// smaller axis factor so every cell stays interior.
PolarGrid task_grid(const PolarGrid &base, const Scene &base_scene, const TaskSpec &t);

EnvFactory task_env_factory(const MetaContext &ctx, const TaskSpec &t, int instance_base);

std::vector<TaskSpec> sample_tasks(Rng &rng, int n, const Scene &base);

struct AdaptResult {
    Params adapted;
    double support_mean_return = 0.0; // zero-shot performance on the task
    int support_episodes = 0;
};

// ANIL inner loop: collect a support rollout, take inner_steps plain-GD
// steps with inner_lr applied to actor_head and critic_head only. All other
// blocks are returned bit-identical.
AdaptResult inner_adapt(const PolicyNet<float> &net, const Params &params,
                        const MetaContext &ctx, const TaskSpec &task, const MetaConfig &cfg);

// single GD step on the heads for a fixed batch (the inner-loop core)
Params adapt_on_batch(const PolicyNet<float> &net, const Params &params,
                      const PpoMinibatch &batch, double inner_lr, const PpoLossConfig &loss);

struct TaskQueryResult {
    Params grads; // PPO-loss gradient evaluated at the adapted parameters
    double query_mean_return = 0.0;
    double support_mean_return = 0.0;
    double query_loss = 0.0;
};

// adapt, roll a query batch under the adapted params, differentiate there
TaskQueryResult task_query_grad(const PolicyNet<float> &net, const Params &params,
                                const MetaContext &ctx, const TaskSpec &task,
                                const MetaConfig &cfg);

struct OuterStats {
    double mean_query_return = 0.0;
    std::vector<double> per_task_returns;
    double adaptation_gain = 0.0; // query mean minus support (zero-shot) mean
    double grad_norm = 0.0;       // before clipping
    double query_loss = 0.0;
};

// First-order outer step: mean of per-task query gradients applied to all
// blocks through Adam, outer_lr on the actor path and critic_lr on the
// critic head, global-norm clipped.
OuterStats fomaml_outer_step(const PolicyNet<float> &net, Params &params,
                             AdamState<float> &opt, const MetaContext &ctx,
                             const std::vector<TaskSpec> &tasks, const MetaConfig &cfg);

struct MetaEvalResult {
    double query_return_undiscounted = 0.0;
    double query_return_discounted = 0.0;
    double zero_shot_return_undiscounted = 0.0; // support episodes under the meta params
    int support_episodes = 0;
    int query_episodes = 0;
};

// Adapt on support_eval_episodes sampled episodes, then average returns over
// n_query_episodes sampled episodes under the adapted policy.
MetaEvalResult meta_eval(const PolicyNet<float> &net, const Params &params,
                         const MetaContext &ctx, const TaskSpec &task, const MetaConfig &cfg);

struct MetaTrainResult {
    Params params;
    AdamState<float> opt;
    int64_t meta_iters = 0;
};

MetaTrainResult meta_train(const MetaContext &ctx, Arch arch, const MetaConfig &cfg,
                           uint64_t seed, const TrainHooks &hooks = {},
                           const TrainStart *start = nullptr);

} // namespace rfseeker
