// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors

#pragma once

#include "rfseeker/features.hpp"
#include "rfseeker/polar_grid.hpp"
#include "rfseeker/rng.hpp"
#include "rfseeker/signal_sim.hpp"

#include <memory>
#include <unordered_map>

namespace rfseeker {

enum class Action : int { ccw1 = 0, ccw2, cw1, cw2, radial_in, radial_out };
inline constexpr int kNumActions = 6;

struct RewardConfig {
    double alpha = 1.0;       // progress scale per meter
    double lambda_step = 0.05; // constant step penalty
    double r_goal = 10.0;      // terminal success bonus
    double epsilon_m = 1.5;    // success radius
    int max_steps = 128;
    double gamma = 0.99; // used by the agents, not by the reward itself

    void validate() const;
};

// alpha * (d_prev - d_curr) - lambda + (r_goal on success);
// throws std::invalid_argument on negative distances
double compute_reward(double d_prev, double d_curr, bool success, const RewardConfig &cfg);

enum class ObservationMode { stats_goal, raw_iq };

const char *observation_mode_name(ObservationMode mode);
ObservationMode observation_mode_from_name(const std::string &name);

// Flat observation payload handed to the networks.
//   stats_goal: [slice][antenna][dim], slice 0 = current cell, 1 = goal cell
//   raw_iq:     [channel][sample], 8 channels (I then Q per antenna) x 1024
struct Observation {
    ObservationMode mode = ObservationMode::stats_goal;
    FeatureKind feature = FeatureKind::phase_diff;
    std::vector<float> data;
};

// flat length of an observation for a mode/feature combination
size_t observation_size(ObservationMode mode, FeatureKind feature);

struct EnvState {
    Cell agent_cell;
    Vec3 agent_pos;
    Vec3 emitter_pos;
    Cell goal_cell;
    int step_count = 0;
    double prev_distance = 0.0;
};

struct StepResult {
    Observation obs;
    double reward = 0.0;
    bool done = false;
    double distance = 0.0;
    bool success = false;
};

struct NavEnvConfig {
    Scene scene;
    PolarGrid grid;
    RewardConfig reward;
    ObservationMode mode = ObservationMode::stats_goal;
    FeatureKind feature = FeatureKind::phase_diff;

    void validate() const;
};

// Goal-conditioned navigation environment. Each instance owns two rng
// streams derived from (seed, instance): cell draws and observation noise.
// Movement and rewards are fully determined by (seed, action sequence);
// noise only enters the observations.
class NavEnv {
  public:
    NavEnv(NavEnvConfig config, std::shared_ptr<const Normalizer> normalizer, uint64_t seed,
           uint64_t instance = 0);

    Observation reset();
    // throws std::logic_error when the episode is already done
    StepResult step(Action action);

    Observation assemble_observation();

    const EnvState &state() const { return state_; }
    const NavEnvConfig &config() const { return config_; }
    bool done() const { return done_; }
    bool started() const { return started_; }

    // distance from an arbitrary cell to the current emitter, used by
    // scripted policies and diagnostics
    double cell_distance(const Cell &c) const;

  private:
    const IQObservation &noise_free_at(const Cell &c);
    std::vector<float> observation_slice(const Cell &c);

    NavEnvConfig config_;
    std::shared_ptr<const Normalizer> normalizer_;
    ArrayGeometry array_;
    Rng rng_reset_;
    Rng rng_noise_;
    EnvState state_{};
    Scene episode_scene_; // scene with the emitter moved to the goal cell
    std::unordered_map<int, IQObservation> cell_cache_;
    bool done_ = true;
    bool started_ = false;
};

} // namespace rfseeker
