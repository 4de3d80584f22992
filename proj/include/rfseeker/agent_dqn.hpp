// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors

#pragma once

#include "rfseeker/adam.hpp"
#include "rfseeker/losses.hpp"
#include "rfseeker/nav_env.hpp"
#include "rfseeker/net.hpp"
#include "rfseeker/replay.hpp"

#include <functional>
#include <memory>

#include "json.hpp"

namespace rfseeker {

using EnvFactory = std::function<std::unique_ptr<NavEnv>(int instance)>;

// Callbacks threaded through the training loops. All are optional.
struct TrainHooks {
    std::function<void(const nlohmann::json &)> on_metric;
    std::function<void(int64_t step, const Params &, const AdamState<float> &)> on_checkpoint;
    std::function<nlohmann::json(const Params &, int64_t step)> snapshot;
};

struct TrainResult {
    Params params;
    AdamState<float> opt;
    int64_t episodes = 0;
    int64_t steps = 0;
};

// Warm start for resuming an interrupted run. `steps` is the number of
// environment steps (meta iterations for meta_train) already consumed, so
// schedules and the step counter continue where the previous run stopped.
// Replay and collector state are rebuilt from scratch.
struct TrainStart {
    Params params;
    AdamState<float> opt;
    int64_t steps = 0;
};

struct DqnConfig {
    double gamma = 0.99;
    double lr = 2.5e-4;
    int64_t target_sync_every = 1000;
    double eps_start = 1.0;
    double eps_end = 0.05;
    double eps_decay_fraction = 0.2;
    int update_every = 4;
    int64_t learn_start = 10000;
    int64_t total_steps = 1000000;
    int batch_size = 128;
    int64_t replay_capacity = 50000;
    int seq_len = 1; // 1 samples flat transitions, >1 samples BPTT windows
    int64_t snapshot_every = 0;   // 0 disables
    int64_t checkpoint_every = 0; // 0 disables

    void validate() const;
    static DqnConfig ff_defaults() { return {}; }
    static DqnConfig recurrent_defaults() {
        DqnConfig c;
        c.learn_start = 5000;
        c.batch_size = 32;
        c.replay_capacity = 5000;
        c.seq_len = 8;
        return c;
    }
};

// ε-greedy action. The network always runs so recurrent memory advances on
// every step regardless of which branch picks the action.
int select_action(const PolicyNet<float> &net, const Params &params,
                  const std::vector<float> &obs, Memory<float> *mem, double eps, Rng &rng);

// y = r + (1 - done) * gamma * max_a Q(s', a; target). Pure targets, no
// gradient path into the target parameters.
std::vector<double> td_targets(const PolicyNet<float> &net, const Params &target_params,
                               const TransitionBatch &batch, double gamma);

// Recurrent targets: the shifted next-observation window is replayed from
// zeroed memory, mirroring how the learner sees its own window.
std::vector<double> td_targets_seq(const PolicyNet<float> &net, const Params &target_params,
                                   const SequenceBatch &batch, double gamma);

struct DqnUpdateStats {
    double loss = 0.0;
    bool applied = false; // false when a non-finite loss or gradient was rejected
};

DqnUpdateStats dqn_update(const PolicyNet<float> &net, Params &params,
                          const Params &target_params, const TransitionBatch &batch,
                          AdamState<float> &opt, const DqnConfig &cfg);

DqnUpdateStats dqn_update_seq(const PolicyNet<float> &net, Params &params,
                              const Params &target_params, const SequenceBatch &batch,
                              AdamState<float> &opt, const DqnConfig &cfg);

TrainResult train_dqn(const EnvFactory &env_factory, Arch arch, const DqnConfig &cfg,
                      uint64_t seed, const TrainHooks &hooks = {},
                      const TrainStart *start = nullptr);

} // namespace rfseeker
