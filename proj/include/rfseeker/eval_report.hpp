// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors

#pragma once

#include "rfseeker/nav_env.hpp"
#include "rfseeker/net.hpp"
#include "rfseeker/polar_grid.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <vector>

#include "json.hpp"

namespace rfseeker {

struct EpisodeStats {
    double return_undiscounted = 0.0;
    double return_discounted = 0.0;
    int length = 0;
    bool success = false;
    double final_distance_m = 0.0;
    double start_distance_m = 0.0;
};

// Maps an observation to an action. episode_start signals that any internal
// recurrent state must be cleared before acting.
using PolicyFn = std::function<int(const Observation &, bool episode_start)>;

// Runs n full episodes on the env, accumulating stats from the env-emitted
// rewards (no recomputation). n = 0 yields an empty result.
std::vector<EpisodeStats> run_episodes(NavEnv &env, const PolicyFn &policy, int n_episodes,
                                       double gamma);

// Network-backed policy. greedy picks the argmax of the head outputs, which
// is both the DQN greedy action and the mode of the categorical policy.
// Sampling draws from the categorical over the logits using rng, which must
// outlive the returned function.
PolicyFn make_net_policy(const PolicyNet<float> &net, const Params &params, bool greedy,
                         Rng *rng);

std::vector<EpisodeStats> run_eval(const PolicyNet<float> &net, const Params &params,
                                   NavEnv &env, int n_episodes, double gamma, bool greedy,
                                   Rng &rng);

// fraction of successful episodes; empty input is an error
double success_rate(const std::vector<EpisodeStats> &stats);

// EV = 1 - Var(target - pred) / Var(target); nullopt when the target
// variance is below 1e-12 (the ratio is meaningless there).
std::optional<double> explained_variance(const std::vector<double> &pred,
                                         const std::vector<double> &target);

struct HeatmapGrid {
    FeatureKind kind = FeatureKind::rms;
    int n_rings = 0;
    int n_sectors = 0;
    std::vector<double> value;    // per cell, mean feature-vector norm over draws
    std::vector<double> variance; // per cell, population variance of the norm
};

// Per-cell feature magnitude map: synthesize n_noise_draws noisy observations
// at each grid cell against the scene's own emitter and record the mean and
// variance of the feature-vector norm.
HeatmapGrid feature_heatmap(const Scene &scene, const PolarGrid &grid, FeatureKind kind,
                            int n_noise_draws, uint64_t seed);

// JSON-lines metric stream, atomically written.
void export_metrics(const std::filesystem::path &path,
                    const std::vector<nlohmann::json> &records);

// CSV with header ring,sector,x,y,value,variance, atomically written.
void export_heatmap(const std::filesystem::path &path, const HeatmapGrid &hm,
                    const PolarGrid &grid);

nlohmann::json episode_to_json(const EpisodeStats &s);

} // namespace rfseeker
