// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors

#include "doctest.h"

#include "rfseeker/signal_sim.hpp"

#include "oracles.hpp"

#include <algorithm>
#include <filesystem>

using namespace rfseeker;
namespace fs = std::filesystem;

namespace {

Scene default_scene() {
    Scene s;
    s.validate();
    return s;
}

double rel_error_db(const IQObservation &got, const IQObservation &want) {
    double err = 0.0, ref = 0.0;
    for (size_t i = 0; i < got.samples.size(); ++i) {
        err += std::norm(got.samples[i] - want.samples[i]);
        ref += std::norm(want.samples[i]);
    }
    return 10.0 * std::log10(err / ref);
}

} // namespace

TEST_CASE("scene: validation catches bad configurations") {
    Scene s = default_scene();
    CHECK_NOTHROW(s.validate());

    Scene bad = s;
    bad.emitter_pos = {50.0, 10.0, 1.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = s;
    bad.wall_reflectivity[2] = {1.2, 0.0};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = s;
    bad.bandwidth_hz = 2.0e9;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = s;
    bad.max_reflection_order = -1;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("trace_paths: direct path delay equals distance over c") {
    Scene s = default_scene();
    s.max_reflection_order = 0;
    Vec3 rx = s.emitter_pos + Vec3{10.0, 0.0, 0.0};
    auto paths = trace_paths(s, rx);
    REQUIRE(paths.size() == 1);
    CHECK(paths[0].delay_s == doctest::Approx(10.0 / kSpeedOfLight).epsilon(1e-12));
    CHECK(paths[0].delay_s == doctest::Approx(33.3564e-9).epsilon(1e-4));
    CHECK(paths[0].order == 0);
    // attenuation magnitude is the free-space factor
    CHECK(std::abs(paths[0].attenuation) ==
          doctest::Approx(s.wavelength() / (4.0 * kPi * 10.0)).epsilon(1e-12));
}

TEST_CASE("trace_paths: image counts per order in a closed box") {
    Scene s = default_scene();
    Vec3 rx{10.0, 10.0, 1.5};

    s.max_reflection_order = 1;
    CHECK(trace_paths(s, rx).size() == 7); // direct + one image per surface

    s.max_reflection_order = 2;
    auto paths = trace_paths(s, rx);
    CHECK(paths.size() == 25);
    int per_order[3] = {0, 0, 0};
    for (const auto &p : paths)
        per_order[p.order]++;
    CHECK(per_order[0] == 1);
    CHECK(per_order[1] == 6);
    CHECK(per_order[2] == 18);
}

TEST_CASE("trace_paths: delays, counts and attenuations match the reflection oracle") {
    Scene s = default_scene();
    // break symmetry so delays are distinct
    s.emitter_pos = {26.31, 19.07, 1.13};
    s.wall_reflectivity = {cplx{0.7, 0.0}, cplx{0.6, 0.1}, cplx{0.5, 0.0},
                           cplx{0.8, -0.1}, cplx{0.4, 0.2}, cplx{0.9, 0.0}};
    s.max_reflection_order = 2;
    Vec3 rx{11.83, 7.41, 1.62};

    auto paths = trace_paths(s, rx);
    auto images = oracles::enumerate_images(s, 2);
    REQUIRE(paths.size() == images.size());

    std::vector<double> got, want;
    for (const auto &p : paths)
        got.push_back(p.delay_s);
    for (const auto &img : images)
        want.push_back((img.pos - rx).norm() / kSpeedOfLight);
    std::sort(want.begin(), want.end());
    for (size_t i = 0; i < got.size(); ++i)
        CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));

    // match each oracle image to a path by delay and compare attenuation
    for (const auto &img : images) {
        double r = (img.pos - rx).norm();
        double tau = r / kSpeedOfLight;
        auto it = std::min_element(paths.begin(), paths.end(),
                                   [tau](const PropagationPath &a, const PropagationPath &b) {
                                       return std::abs(a.delay_s - tau) < std::abs(b.delay_s - tau);
                                   });
        double ang = -2.0 * kPi * s.carrier_freq_hz * tau;
        cplx alpha = img.gamma * (s.wavelength() / (4.0 * kPi * r)) *
                     cplx{std::cos(ang), std::sin(ang)};
        CHECK(std::abs(it->attenuation - alpha) < 1e-12 * std::max(1.0, std::abs(alpha)));
        CHECK(it->order == img.order);
    }

    // sorted by delay
    for (size_t i = 1; i < paths.size(); ++i)
        CHECK(paths[i].delay_s >= paths[i - 1].delay_s);
}

TEST_CASE("trace_paths: rejects bad receiver positions") {
    Scene s = default_scene();
    CHECK_THROWS_AS(trace_paths(s, Vec3{-1.0, 5.0, 1.0}), std::domain_error);
    CHECK_THROWS_AS(trace_paths(s, Vec3{5.0, 35.0, 1.0}), std::domain_error);
    CHECK_THROWS_AS(trace_paths(s, s.emitter_pos), std::domain_error);
}

TEST_CASE("array_response: broadside, endfire and the plane-wave formula") {
    Scene s = default_scene();
    ArrayGeometry arr = make_default_array(s.carrier_freq_hz);
    arr.validate();

    // broadside: arrival perpendicular to the horizontal array plane
    auto a = array_response(arr, 0.3, kPi / 2.0, s.carrier_freq_hz);
    for (int i = 1; i < 4; ++i)
        CHECK(std::abs(a[static_cast<size_t>(i)] - a[0]) < 1e-12);

    // endfire along x: elements 0 and 1 are lambda/2 apart on that axis
    a = array_response(arr, 0.0, 0.0, s.carrier_freq_hz);
    double diff = std::arg(a[1] * std::conj(a[0]));
    CHECK(std::abs(std::abs(diff) - kPi) < 1e-9);

    // random directions against a direct evaluation
    Rng rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        double az = rng.uniform(-kPi, kPi);
        double el = rng.uniform(-kPi / 2.0, kPi / 2.0);
        auto got = array_response(arr, az, el, s.carrier_freq_hz);
        double lambda = kSpeedOfLight / s.carrier_freq_hz;
        Vec3 u{std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)};
        for (int i = 0; i < 4; ++i) {
            const Vec3 &r = arr.element_offsets[static_cast<size_t>(i)];
            double ph = 2.0 * kPi * (u.x * r.x + u.y * r.y + u.z * r.z) / lambda;
            CHECK(std::abs(got[static_cast<size_t>(i)] - cplx{std::cos(ph), std::sin(ph)}) <
                  1e-12);
            CHECK(std::abs(std::abs(got[static_cast<size_t>(i)]) - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("synthesize_waveform: deterministic, unit power, seed sensitive") {
    Scene s = default_scene();
    auto w1 = synthesize_waveform(s);
    auto w2 = synthesize_waveform(s);
    REQUIRE(w1.size() == 1024);
    CHECK(w1 == w2);

    double power = 0.0;
    for (const auto &v : w1)
        power += std::norm(v);
    power /= static_cast<double>(w1.size());
    CHECK(power == doctest::Approx(1.0).epsilon(0.15));

    Scene s2 = s;
    s2.seed = s.seed + 1;
    auto w3 = synthesize_waveform(s2);
    int same = 0;
    for (size_t i = 0; i < w1.size(); ++i)
        if (w1[i] == w3[i])
            ++same;
    CHECK(same == 0);

    CHECK_THROWS_AS(synthesize_waveform(s, 0), std::invalid_argument);
}

TEST_CASE("synthesize_iq: single path gives equal magnitudes and factored phases") {
    Scene s = default_scene();
    s.max_reflection_order = 0;
    s.noise_power = 0.0;
    ArrayGeometry arr = make_default_array(s.carrier_freq_hz);

    // broadside: receiver directly below the emitter
    Vec3 below{s.emitter_pos.x, s.emitter_pos.y, s.emitter_pos.z - 0.75};
    Rng rng(1);
    auto obs = synthesize_iq(s, arr, below, rng);
    for (int n = 0; n < IQObservation::kSamples; ++n)
        for (int a = 1; a < 4; ++a)
            CHECK(std::abs(obs.at(a, n) - obs.at(0, n)) < 1e-15);

    // oblique single path: phase differences equal the array response ones
    Vec3 rx{12.4, 9.2, 1.5};
    auto paths = trace_paths(s, rx);
    REQUIRE(paths.size() == 1);
    auto gains = array_response(arr, paths[0].azimuth_rad, paths[0].elevation_rad,
                                s.carrier_freq_hz);
    obs = synthesize_iq(s, arr, rx, rng);
    for (int a = 0; a < 4; ++a) {
        for (int b = a + 1; b < 4; ++b) {
            double want = std::arg(gains[static_cast<size_t>(a)] *
                                   std::conj(gains[static_cast<size_t>(b)]));
            // any sample with usable magnitude carries the same difference
            cplx prod = obs.at(a, 7) * std::conj(obs.at(b, 7));
            CHECK(std::abs(wrap_angle(std::arg(prod) - want)) < 1e-9);
        }
        // constant magnitude across antennas per sample
        CHECK(std::abs(std::abs(obs.at(a, 7)) - std::abs(obs.at(0, 7))) < 1e-15);
    }
}

TEST_CASE("synthesize_iq: matches the time-domain reference below -40 dB") {
    Rng cfg_rng(2024);
    for (int trial = 0; trial < 3; ++trial) {
        Scene s = default_scene();
        s.noise_power = 0.0;
        s.seed = 5000 + static_cast<uint64_t>(trial);
        s.emitter_pos = {cfg_rng.uniform(5.0, 35.0), cfg_rng.uniform(5.0, 25.0),
                         cfg_rng.uniform(0.5, 3.0)};
        Vec3 rx{cfg_rng.uniform(5.0, 35.0), cfg_rng.uniform(5.0, 25.0),
                cfg_rng.uniform(0.5, 3.0)};
        ArrayGeometry arr = make_default_array(s.carrier_freq_hz);

        auto fast = synthesize_noise_free(s, arr, rx);
        auto slow = oracles::time_domain_synthesize(s, arr, rx, 512);
        CHECK(rel_error_db(fast, slow) < -40.0);
    }
}

TEST_CASE("synthesize_iq: reproducible and monotone in distance at order 0") {
    Scene s = default_scene();
    ArrayGeometry arr = make_default_array(s.carrier_freq_hz);
    Vec3 rx{10.0, 10.0, 1.5};

    Rng r1(7), r2(7);
    auto o1 = synthesize_iq(s, arr, rx, r1);
    auto o2 = synthesize_iq(s, arr, rx, r2);
    CHECK(o1.samples == o2.samples);
    o1.validate();

    s.max_reflection_order = 0;
    s.noise_power = 0.0;
    auto power = [&](const Vec3 &p) {
        auto obs = synthesize_noise_free(s, arr, p);
        double acc = 0.0;
        for (const auto &v : obs.samples)
            acc += std::norm(v);
        return acc;
    };
    Vec3 dir{-1.0, -0.5, 0.0};
    double p5 = power(s.emitter_pos + dir * 5.0);
    double p10 = power(s.emitter_pos + dir * 10.0);
    double p20 = power(s.emitter_pos + dir * 20.0);
    CHECK(p5 > p10);
    CHECK(p10 > p20);
}

TEST_CASE("grid dataset: export and load round trip") {
    Scene s = default_scene();
    s.max_reflection_order = 1;
    ArrayGeometry arr = make_default_array(s.carrier_freq_hz);
    std::vector<Vec3> cells{{10.0, 10.0, 1.5}, {12.0, 11.0, 1.5}, {14.0, 12.0, 1.5}};

    fs::path path = fs::temp_directory_path() / "rfseeker_grid_test" / "grid.rfsk";
    Rng rng(42);
    export_grid_dataset(s, arr, cells, nlohmann::json{{"layout", "list"}}, rng, path);

    auto ds = load_grid_dataset(path);
    REQUIRE(ds.cells.size() == cells.size());
    CHECK(ds.header.at("n_samples") == IQObservation::kSamples);
    CHECK(ds.header.at("grid").at("layout") == "list");

    // payload must equal a fresh synthesis rounded to float32, bit for bit
    Rng rng2(42);
    for (size_t c = 0; c < cells.size(); ++c) {
        auto obs = synthesize_iq(s, arr, cells[c], rng2);
        for (size_t i = 0; i < obs.samples.size(); ++i) {
            CHECK(static_cast<float>(obs.samples[i].real()) ==
                  static_cast<float>(ds.cells[c].samples[i].real()));
            CHECK(static_cast<float>(obs.samples[i].imag()) ==
                  static_cast<float>(ds.cells[c].samples[i].imag()));
        }
    }

    // scene config survives the header round trip
    Scene back = scene_from_json(ds.header.at("scene"));
    CHECK(back.emitter_pos == s.emitter_pos);
    CHECK(back.seed == s.seed);
    CHECK(back.wall_reflectivity == s.wall_reflectivity);

    fs::remove_all(path.parent_path());
}
