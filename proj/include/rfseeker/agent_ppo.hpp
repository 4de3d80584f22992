// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors

#pragma once

#include "rfseeker/agent_dqn.hpp" // EnvFactory, TrainHooks, TrainResult
#include "rfseeker/losses.hpp"

#include <deque>
#include <memory>
#include <optional>
#include <vector>

namespace rfseeker {

struct PpoConfig {
    int n_envs = 8;
    double lr = 2.5e-4;
    bool anneal_lr = true;
    double gamma = 0.997;
    double gae_lambda = 0.95;
    double clip = 0.1;
    double ent_coef = 0.02;
    double vf_coef = 0.5;
    double max_grad_norm = 0.5;
    int minibatch = 128;
    int epochs = 4;
    int rollout_steps = 128;
    int64_t total_steps = 1000000;
    int64_t snapshot_every = 0;   // 0 disables
    int64_t checkpoint_every = 0; // 0 disables

    void validate() const;
    PpoLossConfig loss() const { return {clip, ent_coef, vf_coef}; }
};

// One rollout in step-major layout: index t * n_envs + e.
struct RolloutBuffer {
    int n_envs = 0;
    int n_steps = 0;
    int obs_dim = 0;
    std::vector<float> obs;       // [T][N][obs_dim]
    std::vector<int> actions;     // [T][N]
    std::vector<double> logp_old; // [T][N]
    std::vector<double> values;   // [T][N]
    std::vector<float> rewards;   // [T][N]
    std::vector<uint8_t> dones;   // [T][N], episode ended at this step
    std::vector<float> carry;     // [T][N], 0 where an episode starts
    std::vector<float> mem_h0, mem_c0; // [N][hidden] at rollout start (recurrent)
    std::vector<double> bootstrap;     // [N] V(s_T) under collection params
    std::vector<nlohmann::json> episode_records; // completed during collection

    int rows() const { return n_steps * n_envs; }
};

// Persistent vectorized collection state. Envs keep running across rollouts;
// recurrent memory carries over and is zeroed per env on reset.
struct Collector {
    explicit Collector(const EnvFactory &factory, int n_envs);

    std::vector<std::unique_ptr<NavEnv>> envs;
    std::vector<std::vector<float>> cur_obs;
    Memory<float> mem;
    std::vector<uint8_t> episode_start;
    std::vector<double> ep_return;
    std::vector<int> ep_len;
    int64_t episodes = 0;
    int64_t steps = 0;
};

RolloutBuffer collect_rollout(const PolicyNet<float> &net, const Params &params,
                              Collector &col, int n_steps, Rng &rng);

// GAE + returns for every row of the buffer, per env, using the stored
// bootstrap values. Advantages come back unnormalized.
void compute_buffer_gae(const RolloutBuffer &buf, double gamma, double lam,
                        std::vector<double> &advantages, std::vector<double> &returns);

struct PpoUpdateStats {
    double loss = 0.0;
    double policy_loss = 0.0;
    double value_loss = 0.0;
    double entropy = 0.0;
    double clip_frac = 0.0;
    double clip_frac_first = 0.0; // first minibatch of the first epoch
    std::optional<double> ev;     // explained variance before the update
    double lr = 0.0;
    int minibatches = 0;
};

PpoUpdateStats ppo_update(const PolicyNet<float> &net, Params &params,
                          const RolloutBuffer &buf, AdamState<float> &opt,
                          const PpoConfig &cfg, double lr_now, Rng &shuffle_rng);

TrainResult train_ppo(const EnvFactory &env_factory, Arch arch, const PpoConfig &cfg,
                      uint64_t seed, const TrainHooks &hooks = {},
                      const TrainStart *start = nullptr);

} // namespace rfseeker
