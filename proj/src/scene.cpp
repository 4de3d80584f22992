// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors

#include "rfseeker/scene.hpp"

namespace rfseeker {

void Scene::validate() const {
    if (!(hall_dims.x > 0.0) || !(hall_dims.y > 0.0) || !(hall_dims.z > 0.0))
        throw std::invalid_argument("scene: hall dimensions must be positive");
    if (!contains(emitter_pos))
        throw std::invalid_argument("scene: emitter must lie strictly inside the hall");
    for (const auto &g : wall_reflectivity)
        if (std::abs(g) > 1.0 + 1e-12)
            throw std::invalid_argument("scene: |wall_reflectivity| must not exceed 1");
    if (!(bandwidth_hz > 0.0) || !(carrier_freq_hz > bandwidth_hz))
        throw std::invalid_argument("scene: need carrier_freq_hz > bandwidth_hz > 0");
    if (max_reflection_order < 0)
        throw std::invalid_argument("scene: max_reflection_order must be >= 0");
    if (noise_power < 0.0)
        throw std::invalid_argument("scene: noise_power must be >= 0");
}

void ArrayGeometry::validate() const {
    // the four offsets must come in centrosymmetric pairs (grid centered on
    // the phase reference)
    for (int i = 0; i < 4; ++i) {
        const Vec3 &r = element_offsets[static_cast<size_t>(i)];
        bool has_mirror = false;
        for (int j = 0; j < 4; ++j) {
            const Vec3 &q = element_offsets[static_cast<size_t>(j)];
            if (std::abs(q.x + r.x) < 1e-12 && std::abs(q.y + r.y) < 1e-12 &&
                std::abs(q.z + r.z) < 1e-12)
                has_mirror = true;
        }
        if (!has_mirror)
            throw std::invalid_argument("array: offsets must be symmetric under 180 deg rotation");
    }
}

ArrayGeometry make_default_array(double carrier_freq_hz) {
    if (!(carrier_freq_hz > 0.0))
        throw std::invalid_argument("array: carrier frequency must be positive");
    double half = 0.5 * kSpeedOfLight / carrier_freq_hz / 2.0; // quarter wavelength from center
    ArrayGeometry g;
    g.element_offsets = {Vec3{-half, -half, 0.0}, Vec3{half, -half, 0.0}, Vec3{-half, half, 0.0},
                         Vec3{half, half, 0.0}};
    return g;
}

void IQObservation::validate() const {
    if (samples.size() != static_cast<size_t>(kAntennas) * kSamples)
        throw std::invalid_argument("observation: wrong shape");
    for (const auto &v : samples)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw std::invalid_argument("observation: non-finite sample");
}

} // namespace rfseeker
