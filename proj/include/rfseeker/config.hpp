// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors

#pragma once

#include "rfseeker/agent_dqn.hpp"
#include "rfseeker/agent_ppo.hpp"
#include "rfseeker/meta_anil.hpp"
#include "rfseeker/nav_env.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace rfseeker {

// Malformed or inconsistent experiment config. The CLI maps this to its
// config-error exit code.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Algo { dqn, dqn_recurrent, ppo, ppo_recurrent };

const char *algo_name(Algo a);
Algo algo_from_name(const std::string &name);

struct EvalBlock {
    int n_episodes = 500;
    bool greedy = true;
    std::string heatmap_feature = "all"; // a feature name or "all"
    int heatmap_draws = 16;
};

struct SeedsBlock {
    uint64_t train = 1;
    uint64_t eval = 1;
};

// Everything a command needs, bundled so one file pins an experiment.
struct ExperimentConfig {
    NavEnvConfig env; // scene, grid, reward, observation mode + feature
    Algo algo = Algo::ppo;
    DqnConfig dqn;
    PpoConfig ppo;
    std::optional<MetaConfig> meta;
    EvalBlock eval;
    SeedsBlock seeds;
    std::string out_dir = "runs/exp";
    std::optional<std::string> normalizer_path; // reuse a previously fitted normalizer

    // network architecture implied by algo + observation mode; throws
    // ConfigError for recurrent agents on stats observations
    Arch arch() const;
    void validate() const;
};

// Strict parse. Unknown keys anywhere are rejected naming the key and the
// block it appeared in; type and range problems surface as ConfigError.
ExperimentConfig config_from_json(const nlohmann::json &j);

// Fully resolved form, input plus defaults. Round-trips through
// config_from_json and is what gets copied into the output directory.
nlohmann::json config_to_json(const ExperimentConfig &cfg);

ExperimentConfig load_config(const std::filesystem::path &path);

// FNV-1a 64 over the resolved config dump, hex encoded.
std::string config_hash(const ExperimentConfig &cfg);

} // namespace rfseeker
