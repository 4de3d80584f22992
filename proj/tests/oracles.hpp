// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors
//
// Test-side reference implementations. Everything here is written for
// clarity over speed and is independent of the library code paths it checks.

#pragma once

#include "rfseeker/common.hpp"
#include "rfseeker/fft.hpp"
#include "rfseeker/scene.hpp"
#include "rfseeker/signal_sim.hpp"

#include <vector>

namespace oracles {

// O(n^2) discrete Fourier transform
inline std::vector<rfseeker::cplx> naive_dft(const std::vector<rfseeker::cplx> &x, bool inverse) {
    using rfseeker::cplx;
    using rfseeker::kPi;
    size_t n = x.size();
    std::vector<cplx> out(n);
    double sign = inverse ? 1.0 : -1.0;
    for (size_t k = 0; k < n; ++k) {
        cplx acc{0.0, 0.0};
        for (size_t m = 0; m < n; ++m) {
            double ang = sign * 2.0 * kPi * static_cast<double>(k * m % n) / static_cast<double>(n);
            acc += x[m] * cplx{std::cos(ang), std::sin(ang)};
        }
        out[k] = inverse ? acc / static_cast<double>(n) : acc;
    }
    return out;
}

// --- brute-force image enumeration --------------------------------------- //
// Breadth-first reflection of the emitter across every wall, deduplicated by
// position. Independent of the lattice construction used by trace_paths.

struct ImageSource {
    rfseeker::Vec3 pos;
    rfseeker::cplx gamma; // product of reflection coefficients
    int order = 0;
};

inline std::vector<ImageSource> enumerate_images(const rfseeker::Scene &scene, int max_order) {
    using rfseeker::Vec3;
    std::vector<ImageSource> all{{scene.emitter_pos, {1.0, 0.0}, 0}};
    std::vector<ImageSource> frontier = all;

    auto known = [&all](const Vec3 &p) {
        for (const auto &img : all)
            if ((img.pos - p).norm() < 1e-6)
                return true;
        return false;
    };

    for (int level = 1; level <= max_order; ++level) {
        std::vector<ImageSource> next;
        for (const auto &img : frontier) {
            for (int wall = 0; wall < 6; ++wall) {
                Vec3 p = img.pos;
                switch (wall) {
                case rfseeker::wall_xlo: p.x = -p.x; break;
                case rfseeker::wall_xhi: p.x = 2.0 * scene.hall_dims.x - p.x; break;
                case rfseeker::wall_ylo: p.y = -p.y; break;
                case rfseeker::wall_yhi: p.y = 2.0 * scene.hall_dims.y - p.y; break;
                case rfseeker::wall_zlo: p.z = -p.z; break;
                case rfseeker::wall_zhi: p.z = 2.0 * scene.hall_dims.z - p.z; break;
                }
                if (known(p))
                    continue;
                bool dup = false;
                for (const auto &cand : next)
                    if ((cand.pos - p).norm() < 1e-6)
                        dup = true;
                if (dup)
                    continue;
                next.push_back({p, img.gamma * scene.wall_reflectivity[static_cast<size_t>(wall)],
                                level});
            }
        }
        all.insert(all.end(), next.begin(), next.end());
        frontier = std::move(next);
    }
    return all;
}

// --- time-domain synthesis reference -------------------------------------- //
// Upsamples the source waveform once by zero-padding its spectrum, then per
// path applies a nearest-sample delay on the fine grid. Attenuations carry
// the carrier phase already, so no residual term is needed beyond the
// quantized envelope shift. Assumes the identity array orientation.

inline rfseeker::IQObservation time_domain_synthesize(const rfseeker::Scene &scene,
                                                      const rfseeker::ArrayGeometry &array,
                                                      const rfseeker::Vec3 &rx, int upsample) {
    using rfseeker::cplx;
    using rfseeker::IQObservation;
    using rfseeker::Vec3;

    const int n = IQObservation::kSamples;
    const int m = n * upsample;
    auto s = rfseeker::synthesize_waveform(scene, n);

    // zero-padded spectrum keeps bins 0..n/2-1 low and n/2..n-1 at the top
    std::vector<cplx> spec = s;
    rfseeker::fft(spec);
    std::vector<cplx> up(static_cast<size_t>(m), cplx{0.0, 0.0});
    for (int k = 0; k < n / 2; ++k)
        up[static_cast<size_t>(k)] = spec[static_cast<size_t>(k)];
    for (int k = n / 2; k < n; ++k)
        up[static_cast<size_t>(m - n + k)] = spec[static_cast<size_t>(k)];
    rfseeker::ifft(up);
    for (auto &v : up)
        v *= static_cast<double>(upsample);

    auto images = enumerate_images(scene, scene.max_reflection_order);
    double lambda = scene.wavelength();
    double fs = scene.bandwidth_hz;

    IQObservation obs;
    obs.rx_pos = rx;
    for (const auto &img : images) {
        Vec3 d = img.pos - rx;
        double r = d.norm();
        double tau = r / rfseeker::kSpeedOfLight;
        double carrier = -2.0 * rfseeker::kPi * scene.carrier_freq_hz * tau;
        cplx alpha = img.gamma * (lambda / (4.0 * rfseeker::kPi * r)) *
                     cplx{std::cos(carrier), std::sin(carrier)};
        Vec3 u = d * (1.0 / r);
        auto shift = static_cast<long long>(std::llround(tau * fs * upsample));
        for (int a = 0; a < IQObservation::kAntennas; ++a) {
            const Vec3 &ofs = array.element_offsets[static_cast<size_t>(a)];
            double ph = 2.0 * rfseeker::kPi * u.dot(ofs) / lambda;
            cplx gain = alpha * cplx{std::cos(ph), std::sin(ph)};
            for (int i = 0; i < n; ++i) {
                long long idx = (static_cast<long long>(i) * upsample - shift) % m;
                if (idx < 0)
                    idx += m;
                obs.at(a, i) += gain * up[static_cast<size_t>(idx)];
            }
        }
    }
    return obs;
}

// Welford online mean/std per channel, independent of the two-pass fit
struct WelfordChannel {
    double mean = 0.0, m2 = 0.0;
    long long count = 0;
    void push(double x) {
        ++count;
        double d = x - mean;
        mean += d / static_cast<double>(count);
        m2 += d * (x - mean);
    }
    double std_pop() const { return std::sqrt(m2 / static_cast<double>(count)); }
};

} // namespace oracles
