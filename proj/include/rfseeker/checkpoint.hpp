// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors

#pragma once

#include "rfseeker/adam.hpp"
#include "rfseeker/nn.hpp"

#include "json.hpp"

#include <filesystem>
#include <optional>

namespace rfseeker {

struct CheckpointMeta {
    Arch arch = Arch::ff_stats;
    int obs_dim = 0;
    int n_actions = 0;
    int64_t opt_step = 0;    // optimizer updates applied
    int64_t train_steps = 0; // environment steps consumed
    std::string config_hash;
    nlohmann::json extra = nlohmann::json::object(); // agent-owned counters
};

struct Checkpoint {
    Params params;
    std::optional<AdamState<float>> opt;
    CheckpointMeta meta;
};

// JSON manifest followed by a little-endian float32 payload holding the
// parameters and, when present, the Adam moment vectors. Atomic on disk.
void save_checkpoint(const std::filesystem::path &path, const Params &params,
                     const AdamState<float> *opt, const CheckpointMeta &meta);

Checkpoint load_checkpoint(const std::filesystem::path &path);

} // namespace rfseeker
