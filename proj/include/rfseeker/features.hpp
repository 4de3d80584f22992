// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors

#pragma once

#include "rfseeker/scene.hpp"

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace rfseeker {

enum class FeatureKind { mean, std_dev, rms, phase_diff, raw_iq };

const char *feature_kind_name(FeatureKind kind);
FeatureKind feature_kind_from_name(const std::string &name);

// per-antenna feature width; raw_iq bypasses the feature path entirely
int feature_dim(FeatureKind kind);

struct FeatureVector {
    FeatureKind kind = FeatureKind::mean;
    std::vector<double> values; // flat [antenna][dim], 4 x feature_dim(kind)
};

// per antenna [mean(I), mean(Q)]
FeatureVector feat_mean(const IQObservation &obs);
// per antenna [std(I), std(Q)], population form
FeatureVector feat_std(const IQObservation &obs);
// per antenna sqrt(mean |y|^2)
FeatureVector feat_rms(const IQObservation &obs);
// per antenna, circular mean of arg(y_i conj(y_j)) to each other antenna,
// j ascending; throws std::domain_error on an all-zero channel
FeatureVector feat_phase_diff(const IQObservation &obs);

// dispatch by kind; raw_iq is rejected with std::invalid_argument
FeatureVector extract_features(const IQObservation &obs, FeatureKind kind);

// channel-major raw tensor: 8 channels (I then Q per antenna) x 1024 samples
std::vector<double> raw_tensor(const IQObservation &obs);

// Channel-wise z-score transform. A tensor of length C*m is interpreted as C
// contiguous channel blocks of m values each (features: m = 1, raw: m = 1024).
struct Normalizer {
    std::vector<double> mu;
    std::vector<double> sigma; // floored at 1e-6 when fitted
    std::string fitted_on;

    size_t channels() const { return mu.size(); }
    std::vector<double> apply(const std::vector<double> &x) const;
    std::vector<double> invert(const std::vector<double> &x) const;
};

// two-pass channel statistics over the whole dataset; every tensor must have
// length n_channels * m for a common m
Normalizer fit_normalizer(const std::vector<std::vector<double>> &dataset, size_t n_channels,
                          const std::string &fitted_on);

void save_normalizer(const Normalizer &norm, const std::filesystem::path &path);
Normalizer load_normalizer(const std::filesystem::path &path);

nlohmann::json normalizer_to_json(const Normalizer &norm);
Normalizer normalizer_from_json(const nlohmann::json &j);

} // namespace rfseeker
