// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors

#pragma once

#include "rfseeker/common.hpp"

#include <array>
#include <cstdint>

namespace rfseeker {

// Wall order used everywhere a per-surface quantity appears:
// x=0, x=Lx, y=0, y=Ly, z=0 (floor), z=Lz (ceiling).
enum Wall : int { wall_xlo = 0, wall_xhi, wall_ylo, wall_yhi, wall_zlo, wall_zhi };

// Rectangular hall with an emitter inside. All surfaces reflect specularly
// with a complex reflection coefficient.
struct Scene {
    Vec3 hall_dims{40.0, 30.0, 8.0};
    std::array<cplx, 6> wall_reflectivity{cplx{0.7, 0.0}, cplx{0.7, 0.0}, cplx{0.7, 0.0},
                                          cplx{0.7, 0.0}, cplx{0.7, 0.0}, cplx{0.7, 0.0}};
    Vec3 emitter_pos{26.0, 19.0, 1.0};
    double carrier_freq_hz = 1.57542e9;
    double bandwidth_hz = 1.0e8;
    int max_reflection_order = 2;
    double noise_power = 1.0e-8;
    uint64_t seed = 1234;

    double wavelength() const { return kSpeedOfLight / carrier_freq_hz; }

    // throws std::invalid_argument when any invariant is broken
    void validate() const;

    bool contains(const Vec3 &p) const {
        return p.x > 0.0 && p.x < hall_dims.x && p.y > 0.0 && p.y < hall_dims.y && p.z > 0.0 &&
               p.z < hall_dims.z;
    }
};

// One resolved propagation path from the emitter to the receive position.
struct PropagationPath {
    cplx attenuation{0.0, 0.0}; // alpha, includes the carrier phase
    double delay_s = 0.0;
    double azimuth_rad = 0.0;   // arrival direction, measured in the world frame
    double elevation_rad = 0.0; // positive above the horizontal plane
    int order = 0;              // number of wall bounces
};

// 2x2 receive patch. Offsets are in the local array plane; orientation maps
// local coordinates into the world frame (row-major 3x3, identity default).
struct ArrayGeometry {
    std::array<Vec3, 4> element_offsets{};
    std::array<double, 9> orientation{1, 0, 0, 0, 1, 0, 0, 0, 1};

    Vec3 world_offset(int i) const {
        const Vec3 &r = element_offsets[static_cast<size_t>(i)];
        return {orientation[0] * r.x + orientation[1] * r.y + orientation[2] * r.z,
                orientation[3] * r.x + orientation[4] * r.y + orientation[5] * r.z,
                orientation[6] * r.x + orientation[7] * r.y + orientation[8] * r.z};
    }

    void validate() const;
};

// Half-wavelength 2x2 grid in the horizontal plane, centered on the phase
// reference, elements ordered row-major (-x-y, +x-y, -x+y, +x+y).
ArrayGeometry make_default_array(double carrier_freq_hz);

// One captured observation window.
struct IQObservation {
    static constexpr int kAntennas = 4;
    static constexpr int kSamples = 1024;

    std::vector<cplx> samples; // flat [antenna][sample]
    Vec3 rx_pos{};

    IQObservation() : samples(static_cast<size_t>(kAntennas) * kSamples) {}

    cplx &at(int ant, int n) { return samples[static_cast<size_t>(ant) * kSamples + n]; }
    const cplx &at(int ant, int n) const {
        return samples[static_cast<size_t>(ant) * kSamples + n];
    }

    void validate() const;
};

} // namespace rfseeker
