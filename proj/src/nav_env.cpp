// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors

#include "rfseeker/nav_env.hpp"

namespace rfseeker {

void RewardConfig::validate() const {
    if (!(alpha > 0.0) || !(lambda_step > 0.0) || !(r_goal > 0.0) || !(epsilon_m > 0.0))
        throw std::invalid_argument("reward: alpha, lambda_step, r_goal, epsilon_m must be > 0");
    if (max_steps < 1)
        throw std::invalid_argument("reward: max_steps must be >= 1");
    if (!(gamma > 0.0) || gamma > 1.0)
        throw std::invalid_argument("reward: gamma must lie in (0, 1]");
}

double compute_reward(double d_prev, double d_curr, bool success, const RewardConfig &cfg) {
    if (d_prev < 0.0 || d_curr < 0.0)
        throw std::invalid_argument("compute_reward: distances must be non-negative");
    double r = cfg.alpha * (d_prev - d_curr) - cfg.lambda_step;
    if (success)
        r += cfg.r_goal;
    return r;
}

const char *observation_mode_name(ObservationMode mode) {
    return mode == ObservationMode::stats_goal ? "stats_goal" : "raw_iq";
}

ObservationMode observation_mode_from_name(const std::string &name) {
    if (name == "stats_goal")
        return ObservationMode::stats_goal;
    if (name == "raw_iq")
        return ObservationMode::raw_iq;
    throw std::invalid_argument("unknown observation mode: " + name);
}

size_t observation_size(ObservationMode mode, FeatureKind feature) {
    if (mode == ObservationMode::raw_iq)
        return static_cast<size_t>(2 * IQObservation::kAntennas) * IQObservation::kSamples;
    return static_cast<size_t>(2 * IQObservation::kAntennas) *
           static_cast<size_t>(feature_dim(feature));
}

void NavEnvConfig::validate() const {
    scene.validate();
    grid.validate(scene);
    reward.validate();
    if (mode == ObservationMode::stats_goal && feature == FeatureKind::raw_iq)
        throw std::invalid_argument("env: stats_goal mode needs a statistical feature kind");
    if (mode == ObservationMode::raw_iq && feature != FeatureKind::raw_iq)
        throw std::invalid_argument("env: raw_iq mode requires the raw_iq feature kind");
}

NavEnv::NavEnv(NavEnvConfig config, std::shared_ptr<const Normalizer> normalizer, uint64_t seed,
               uint64_t instance)
    : config_(std::move(config)), normalizer_(std::move(normalizer)),
      array_(make_default_array(config_.scene.carrier_freq_hz)),
      rng_reset_(Rng::stream(seed, RngStream::env_reset, instance)),
      rng_noise_(Rng::stream(seed, RngStream::obs_noise, instance)),
      episode_scene_(config_.scene) {
    config_.validate();
    if (!normalizer_)
        throw std::invalid_argument("env: missing normalizer");
    size_t want = (config_.mode == ObservationMode::raw_iq)
                      ? static_cast<size_t>(2 * IQObservation::kAntennas)
                      : static_cast<size_t>(IQObservation::kAntennas) *
                            static_cast<size_t>(feature_dim(config_.feature));
    if (normalizer_->channels() != want)
        throw std::invalid_argument("env: normalizer channel count does not match observation");
}

Observation NavEnv::reset() {
    int n = config_.grid.n_cells();
    int agent = static_cast<int>(rng_reset_.uniform_int(static_cast<uint64_t>(n)));
    int goal = agent;
    while (goal == agent)
        goal = static_cast<int>(rng_reset_.uniform_int(static_cast<uint64_t>(n)));

    state_.agent_cell = config_.grid.cell_from_index(agent);
    state_.goal_cell = config_.grid.cell_from_index(goal);
    state_.agent_pos = cell_to_position(config_.grid, state_.agent_cell);

    // the emitter sits on the goal cell's vertical axis at its own height, so
    // receiver and emitter never coincide even on the goal cell itself
    Vec3 goal_pos = cell_to_position(config_.grid, state_.goal_cell);
    state_.emitter_pos = {goal_pos.x, goal_pos.y, config_.scene.emitter_pos.z};
    episode_scene_ = config_.scene;
    episode_scene_.emitter_pos = state_.emitter_pos;
    cell_cache_.clear();

    state_.step_count = 0;
    state_.prev_distance = (state_.agent_pos - state_.emitter_pos).norm();
    done_ = false;
    started_ = true;
    return assemble_observation();
}

StepResult NavEnv::step(Action action) {
    if (!started_)
        throw std::logic_error("env: step before reset");
    if (done_)
        throw std::logic_error("env: step after episode end");

    Cell c = state_.agent_cell;
    int n = config_.grid.n_sectors;
    switch (action) {
    case Action::ccw1:
        c.sector = (c.sector + 1) % n;
        break;
    case Action::ccw2:
        c.sector = (c.sector + 2) % n;
        break;
    case Action::cw1:
        c.sector = (c.sector - 1 + n) % n;
        break;
    case Action::cw2:
        c.sector = (c.sector - 2 + 2 * n) % n;
        break;
    case Action::radial_in:
        c.ring = std::max(0, c.ring - 1);
        break;
    case Action::radial_out:
        c.ring = std::min(config_.grid.n_rings - 1, c.ring + 1);
        break;
    default:
        throw std::invalid_argument("env: unknown action");
    }

    state_.agent_cell = c;
    state_.agent_pos = cell_to_position(config_.grid, c);
    state_.step_count += 1;

    double d = (state_.agent_pos - state_.emitter_pos).norm();
    bool success = d <= config_.reward.epsilon_m;
    done_ = success || state_.step_count >= config_.reward.max_steps;

    StepResult out;
    out.reward = compute_reward(state_.prev_distance, d, success, config_.reward);
    state_.prev_distance = d;
    out.done = done_;
    out.distance = d;
    out.success = success;
    out.obs = assemble_observation();
    return out;
}

double NavEnv::cell_distance(const Cell &c) const {
    return (cell_to_position(config_.grid, c) - state_.emitter_pos).norm();
}

const IQObservation &NavEnv::noise_free_at(const Cell &c) {
    int idx = config_.grid.cell_index(c);
    auto it = cell_cache_.find(idx);
    if (it == cell_cache_.end()) {
        IQObservation obs =
            synthesize_noise_free(episode_scene_, array_, cell_to_position(config_.grid, c));
        it = cell_cache_.emplace(idx, std::move(obs)).first;
    }
    return it->second;
}

std::vector<float> NavEnv::observation_slice(const Cell &c) {
    IQObservation obs = noise_free_at(c);
    add_noise(obs, episode_scene_.noise_power, rng_noise_);

    std::vector<double> tensor;
    if (config_.mode == ObservationMode::raw_iq)
        tensor = raw_tensor(obs);
    else
        tensor = extract_features(obs, config_.feature).values;
    auto z = normalizer_->apply(tensor);
    return std::vector<float>(z.begin(), z.end());
}

Observation NavEnv::assemble_observation() {
    Observation o;
    o.mode = config_.mode;
    o.feature = config_.feature;
    if (config_.mode == ObservationMode::raw_iq) {
        o.data = observation_slice(state_.agent_cell);
    } else {
        o.data = observation_slice(state_.agent_cell);
        auto goal = observation_slice(state_.goal_cell);
        o.data.insert(o.data.end(), goal.begin(), goal.end());
    }
    return o;
}

} // namespace rfseeker
