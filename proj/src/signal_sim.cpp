// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors

#include "rfseeker/signal_sim.hpp"

#include "rfseeker/fft.hpp"
#include "rfseeker/io.hpp"
#include "rfseeker/version.hpp"

#include <algorithm>
#include <cstring>

namespace rfseeker {

using json = nlohmann::json;

namespace {

// Mirrored emitter coordinate along one axis. Index m counts how often the
// unfolded ray crosses that axis' walls; even m keeps the emitter offset,
// odd m mirrors it into the neighbouring cell.
double image_coord(int m, double span, double e) {
    if (m % 2 == 0)
        return m * span + e;
    return (m + 1) * span - e;
}

// Product of reflection coefficients collected along one axis. The unfolded
// ray alternates between the two walls of the axis, starting with the wall on
// the side it travels toward.
cplx axis_reflectivity(int m, cplx lo, cplx hi) {
    int n = std::abs(m);
    int n_first = (n + 1) / 2;
    int n_second = n / 2;
    cplx first = (m > 0) ? hi : lo;
    cplx second = (m > 0) ? lo : hi;
    cplx prod{1.0, 0.0};
    for (int i = 0; i < n_first; ++i)
        prod *= first;
    for (int i = 0; i < n_second; ++i)
        prod *= second;
    return prod;
}

} // namespace

Vec3 arrival_unit_vector(double azimuth_rad, double elevation_rad) {
    double ce = std::cos(elevation_rad);
    return {ce * std::cos(azimuth_rad), ce * std::sin(azimuth_rad), std::sin(elevation_rad)};
}

std::vector<PropagationPath> trace_paths(const Scene &scene, const Vec3 &rx_pos) {
    scene.validate();
    if (!scene.contains(rx_pos))
        throw std::domain_error("trace_paths: receiver lies outside the hall");
    if ((rx_pos - scene.emitter_pos).norm() < 1e-9)
        throw std::domain_error("trace_paths: degenerate geometry, receiver at the emitter");

    const int order = scene.max_reflection_order;
    const double lambda = scene.wavelength();
    const Vec3 &dims = scene.hall_dims;
    const Vec3 &e = scene.emitter_pos;

    std::vector<PropagationPath> paths;
    paths.reserve(static_cast<size_t>(2 * order * order + order) * 2 + 1);

    for (int mx = -order; mx <= order; ++mx) {
        for (int my = -(order - std::abs(mx)); my <= order - std::abs(mx); ++my) {
            int rem = order - std::abs(mx) - std::abs(my);
            for (int mz = -rem; mz <= rem; ++mz) {
                Vec3 img{image_coord(mx, dims.x, e.x), image_coord(my, dims.y, e.y),
                         image_coord(mz, dims.z, e.z)};
                Vec3 d = img - rx_pos;
                double r = d.norm();
                cplx gamma = axis_reflectivity(mx, scene.wall_reflectivity[wall_xlo],
                                               scene.wall_reflectivity[wall_xhi]) *
                             axis_reflectivity(my, scene.wall_reflectivity[wall_ylo],
                                               scene.wall_reflectivity[wall_yhi]) *
                             axis_reflectivity(mz, scene.wall_reflectivity[wall_zlo],
                                               scene.wall_reflectivity[wall_zhi]);
                PropagationPath p;
                p.delay_s = r / kSpeedOfLight;
                p.order = std::abs(mx) + std::abs(my) + std::abs(mz);
                double phase = -2.0 * kPi * scene.carrier_freq_hz * p.delay_s;
                p.attenuation = gamma * (lambda / (4.0 * kPi * r)) *
                                cplx{std::cos(phase), std::sin(phase)};
                p.azimuth_rad = std::atan2(d.y, d.x);
                p.elevation_rad = std::asin(std::clamp(d.z / r, -1.0, 1.0));
                paths.push_back(p);
            }
        }
    }

    std::sort(paths.begin(), paths.end(), [](const PropagationPath &a, const PropagationPath &b) {
        if (a.delay_s != b.delay_s)
            return a.delay_s < b.delay_s;
        if (a.azimuth_rad != b.azimuth_rad)
            return a.azimuth_rad < b.azimuth_rad;
        return a.elevation_rad < b.elevation_rad;
    });
    return paths;
}

std::array<cplx, 4> array_response(const ArrayGeometry &array, double azimuth_rad,
                                   double elevation_rad, double carrier_freq_hz) {
    if (!(carrier_freq_hz > 0.0))
        throw std::invalid_argument("array_response: carrier frequency must be positive");
    double lambda = kSpeedOfLight / carrier_freq_hz;
    Vec3 u = arrival_unit_vector(azimuth_rad, elevation_rad);
    std::array<cplx, 4> a;
    for (int i = 0; i < 4; ++i) {
        double phase = 2.0 * kPi * u.dot(array.world_offset(i)) / lambda;
        a[static_cast<size_t>(i)] = {std::cos(phase), std::sin(phase)};
    }
    return a;
}

std::vector<cplx> synthesize_waveform(const Scene &scene, int n_samples) {
    if (n_samples <= 0)
        throw std::invalid_argument("synthesize_waveform: n_samples must be positive");
    Rng rng = Rng::stream(scene.seed, RngStream::waveform);
    std::vector<cplx> s(static_cast<size_t>(n_samples));
    const double scale = 1.0 / std::sqrt(2.0);
    for (auto &v : s) {
        double re = rng.normal();
        double im = rng.normal();
        v = {re * scale, im * scale};
    }
    return s;
}

IQObservation synthesize_noise_free(const Scene &scene, const ArrayGeometry &array,
                                    const Vec3 &rx_pos) {
    auto paths = trace_paths(scene, rx_pos);
    auto s = synthesize_waveform(scene, IQObservation::kSamples);

    const int n = IQObservation::kSamples;
    std::vector<cplx> spectrum = s;
    fft(spectrum);

    std::array<std::vector<cplx>, 4> acc;
    for (auto &a : acc)
        a.assign(static_cast<size_t>(n), cplx{0.0, 0.0});

    // per path: delayed spectrum = S[k] * e^{-j 2 pi f_k tau}; the ramp is
    // generated by recurrence within each frequency half, re-anchored every
    // 64 bins to keep rounding drift negligible
    std::vector<cplx> shifted(static_cast<size_t>(n));
    for (const auto &path : paths) {
        auto gains = array_response(array, path.azimuth_rad, path.elevation_rad,
                                    scene.carrier_freq_hz);
        double step_ang =
            -2.0 * kPi * scene.bandwidth_hz / static_cast<double>(n) * path.delay_s;
        cplx step{std::cos(step_ang), std::sin(step_ang)};
        cplx ramp{1.0, 0.0};
        for (int k = 0; k < n; ++k) {
            if (k % 64 == 0) {
                double ang = -2.0 * kPi *
                             fft_bin_freq(static_cast<size_t>(k), static_cast<size_t>(n),
                                          scene.bandwidth_hz) *
                             path.delay_s;
                ramp = {std::cos(ang), std::sin(ang)};
            }
            shifted[static_cast<size_t>(k)] = spectrum[static_cast<size_t>(k)] * ramp;
            ramp *= step;
        }
        for (int i = 0; i < 4; ++i) {
            cplx c = path.attenuation * gains[static_cast<size_t>(i)];
            auto &dst = acc[static_cast<size_t>(i)];
            for (int k = 0; k < n; ++k)
                dst[static_cast<size_t>(k)] += c * shifted[static_cast<size_t>(k)];
        }
    }

    IQObservation obs;
    obs.rx_pos = rx_pos;
    for (int i = 0; i < 4; ++i) {
        ifft(acc[static_cast<size_t>(i)]);
        std::copy(acc[static_cast<size_t>(i)].begin(), acc[static_cast<size_t>(i)].end(),
                  obs.samples.begin() + static_cast<size_t>(i) * n);
    }
    return obs;
}

void add_noise(IQObservation &obs, double noise_power, Rng &rng) {
    if (noise_power < 0.0)
        throw std::invalid_argument("add_noise: noise_power must be >= 0");
    if (noise_power == 0.0)
        return;
    double sigma = std::sqrt(noise_power * 0.5);
    for (auto &v : obs.samples) {
        double re = rng.normal();
        double im = rng.normal();
        v += cplx{re * sigma, im * sigma};
    }
}

IQObservation synthesize_iq(const Scene &scene, const ArrayGeometry &array, const Vec3 &rx_pos,
                            Rng &rng) {
    IQObservation obs = synthesize_noise_free(scene, array, rx_pos);
    add_noise(obs, scene.noise_power, rng);
    return obs;
}

// --- dataset export ------------------------------------------------------ //

namespace {
constexpr char kGridMagic[8] = {'R', 'F', 'S', 'K', 'G', 'R', 'I', 'D'};
}

json scene_to_json(const Scene &scene) {
    json refl = json::array();
    for (const auto &g : scene.wall_reflectivity)
        refl.push_back({g.real(), g.imag()});
    return json{{"hall_dims", {scene.hall_dims.x, scene.hall_dims.y, scene.hall_dims.z}},
                {"wall_reflectivity", refl},
                {"emitter_pos", {scene.emitter_pos.x, scene.emitter_pos.y, scene.emitter_pos.z}},
                {"carrier_freq_hz", scene.carrier_freq_hz},
                {"bandwidth_hz", scene.bandwidth_hz},
                {"max_reflection_order", scene.max_reflection_order},
                {"noise_power", scene.noise_power},
                {"seed", scene.seed}};
}

Scene scene_from_json(const json &j) {
    Scene s;
    if (j.contains("hall_dims")) {
        auto d = j.at("hall_dims");
        s.hall_dims = {d.at(0), d.at(1), d.at(2)};
    }
    if (j.contains("wall_reflectivity")) {
        const auto &r = j.at("wall_reflectivity");
        if (r.is_number()) {
            for (auto &g : s.wall_reflectivity)
                g = cplx{r.get<double>(), 0.0};
        } else if (r.is_array() && r.size() == 2 && r.at(0).is_number()) {
            for (auto &g : s.wall_reflectivity)
                g = cplx{r.at(0).get<double>(), r.at(1).get<double>()};
        } else if (r.is_array() && r.size() == 6) {
            for (size_t i = 0; i < 6; ++i) {
                const auto &gi = r.at(i);
                if (gi.is_number())
                    s.wall_reflectivity[i] = cplx{gi.get<double>(), 0.0};
                else
                    s.wall_reflectivity[i] = cplx{gi.at(0).get<double>(), gi.at(1).get<double>()};
            }
        } else {
            throw std::invalid_argument(
                "scene: wall_reflectivity must be a number, [re, im], or a list of 6 entries");
        }
    }
    if (j.contains("emitter_pos")) {
        auto p = j.at("emitter_pos");
        s.emitter_pos = {p.at(0), p.at(1), p.at(2)};
    }
    if (j.contains("carrier_freq_hz"))
        s.carrier_freq_hz = j.at("carrier_freq_hz");
    if (j.contains("bandwidth_hz"))
        s.bandwidth_hz = j.at("bandwidth_hz");
    if (j.contains("max_reflection_order"))
        s.max_reflection_order = j.at("max_reflection_order");
    if (j.contains("noise_power"))
        s.noise_power = j.at("noise_power");
    if (j.contains("seed"))
        s.seed = j.at("seed");
    s.validate();
    return s;
}

void export_grid_dataset(const Scene &scene, const ArrayGeometry &array,
                         const std::vector<Vec3> &positions, const json &grid_meta, Rng &rng,
                         const std::filesystem::path &path) {
    json header{{"format", "rfseeker-grid"},
                {"version", kGridFormatVersion},
                {"scene", scene_to_json(scene)},
                {"grid", grid_meta},
                {"n_cells", positions.size()},
                {"n_antennas", IQObservation::kAntennas},
                {"n_samples", IQObservation::kSamples}};
    std::string header_str = header.dump();

    std::vector<uint8_t> buf;
    size_t payload = positions.size() * IQObservation::kAntennas * IQObservation::kSamples * 8;
    buf.reserve(sizeof kGridMagic + 4 + 8 + header_str.size() + payload);
    io::put_bytes(buf, kGridMagic, sizeof kGridMagic);
    io::put_u32(buf, kGridFormatVersion);
    io::put_u64(buf, header_str.size());
    io::put_bytes(buf, header_str.data(), header_str.size());

    for (const auto &pos : positions) {
        IQObservation obs = synthesize_iq(scene, array, pos, rng);
        for (const auto &v : obs.samples) {
            io::put_f32(buf, static_cast<float>(v.real()));
            io::put_f32(buf, static_cast<float>(v.imag()));
        }
    }
    io::atomic_write(path, buf.data(), buf.size());
}

GridDataset load_grid_dataset(const std::filesystem::path &path) {
    auto buf = io::read_all(path);
    size_t pos = 0;
    char magic[8];
    io::get_bytes(buf, pos, magic, sizeof magic);
    if (std::memcmp(magic, kGridMagic, sizeof magic) != 0)
        throw std::runtime_error("grid dataset: bad magic");
    uint32_t version = io::get_u32(buf, pos);
    if (version != static_cast<uint32_t>(kGridFormatVersion))
        throw std::runtime_error("grid dataset: unsupported version");
    uint64_t hlen = io::get_u64(buf, pos);
    if (pos + hlen > buf.size())
        throw std::runtime_error("grid dataset: truncated header");
    json header = json::parse(buf.begin() + static_cast<ptrdiff_t>(pos),
                              buf.begin() + static_cast<ptrdiff_t>(pos + hlen));
    pos += hlen;

    size_t n_cells = header.at("n_cells");
    GridDataset ds;
    ds.header = header;
    ds.cells.resize(n_cells);
    for (auto &obs : ds.cells)
        for (auto &v : obs.samples) {
            float re = io::get_f32(buf, pos);
            float im = io::get_f32(buf, pos);
            v = {static_cast<double>(re), static_cast<double>(im)};
        }
    if (pos != buf.size())
        throw std::runtime_error("grid dataset: trailing bytes");
    return ds;
}

} // namespace rfseeker
