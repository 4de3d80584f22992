// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors
//
// Image-source multipath simulator. A shoebox room turns specular wall
// reflections into a lattice of mirrored emitter copies; summing the
// contributions of all copies up to a bounce order gives the received
// baseband signal at any point inside.

#pragma once

#include "rfseeker/rng.hpp"
#include "rfseeker/scene.hpp"

#include <filesystem>
#include <vector>

#include "json.hpp"

namespace rfseeker {

// All emitter-to-receiver paths up to scene.max_reflection_order, sorted by
// delay ascending (ties broken by arrival angle for a total order).
// Throws std::domain_error when rx_pos lies outside the hall or coincides
// with the emitter.
std::vector<PropagationPath> trace_paths(const Scene &scene, const Vec3 &rx_pos);

// Plane-wave response of the four elements for an arrival direction given as
// azimuth/elevation in the world frame. Unit magnitude per element.
std::array<cplx, 4> array_response(const ArrayGeometry &array, double azimuth_rad,
                                   double elevation_rad, double carrier_freq_hz);

// unit vector pointing from the receiver toward the arrival direction
Vec3 arrival_unit_vector(double azimuth_rad, double elevation_rad);

// Transmitted complex baseband waveform: band-limited white noise with unit
// average power in expectation, deterministic in scene.seed.
std::vector<cplx> synthesize_waveform(const Scene &scene, int n_samples = IQObservation::kSamples);

// Noise-free received window at rx_pos: per antenna the sum over paths of
// alpha_l * a_i(theta_l, phi_l) * s(t - tau_l), with fractional delays applied
// as frequency-domain phase ramps.
IQObservation synthesize_noise_free(const Scene &scene, const ArrayGeometry &array,
                                    const Vec3 &rx_pos);

// Adds circular complex Gaussian noise with total variance noise_power to
// every sample. Draw order is antenna-major, real part first.
void add_noise(IQObservation &obs, double noise_power, Rng &rng);

// synthesize_noise_free + add_noise(scene.noise_power)
IQObservation synthesize_iq(const Scene &scene, const ArrayGeometry &array, const Vec3 &rx_pos,
                            Rng &rng);

// --- observation-grid dataset ------------------------------------------- //

struct GridDataset {
    nlohmann::json header;
    std::vector<IQObservation> cells;
};

// One observation per position, written as a JSON header followed by a
// little-endian float32 payload, antenna-major then sample-major, I/Q
// interleaved. grid_meta is stored verbatim in the header.
void export_grid_dataset(const Scene &scene, const ArrayGeometry &array,
                         const std::vector<Vec3> &positions, const nlohmann::json &grid_meta,
                         Rng &rng, const std::filesystem::path &path);

GridDataset load_grid_dataset(const std::filesystem::path &path);

// scene (de)serialization shared by datasets, configs and checkpoints
nlohmann::json scene_to_json(const Scene &scene);
Scene scene_from_json(const nlohmann::json &j);

} // namespace rfseeker
