// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors

#include "rfseeker/eval_report.hpp"

#include "rfseeker/categorical.hpp"
#include "rfseeker/io.hpp"
#include "rfseeker/signal_sim.hpp"

#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace rfseeker {

std::vector<EpisodeStats> run_episodes(NavEnv &env, const PolicyFn &policy, int n_episodes,
                                       double gamma) {
    if (n_episodes < 0)
        throw std::invalid_argument("run_episodes: negative episode count");
    std::vector<EpisodeStats> out;
    out.reserve(n_episodes);
    for (int ep = 0; ep < n_episodes; ++ep) {
        Observation obs = env.reset();
        EpisodeStats st;
        st.start_distance_m = env.state().prev_distance;
        double discount = 1.0;
        bool first = true;
        while (true) {
            const int action = policy(obs, first);
            first = false;
            StepResult r = env.step(static_cast<Action>(action));
            st.return_undiscounted += r.reward;
            st.return_discounted += discount * r.reward;
            discount *= gamma;
            ++st.length;
            if (r.done) {
                st.success = r.success;
                st.final_distance_m = r.distance;
                break;
            }
            obs = std::move(r.obs);
        }
        out.push_back(st);
    }
    return out;
}

PolicyFn make_net_policy(const PolicyNet<float> &net, const Params &params, bool greedy,
                         Rng *rng) {
    if (!greedy && !rng)
        throw std::invalid_argument("make_net_policy: sampling needs an rng");
    auto mem = std::make_shared<Memory<float>>(zero_memory<float>(1));
    const bool recurrent = net.recurrent();
    return [&net, &params, greedy, rng, mem, recurrent](const Observation &obs,
                                                        bool episode_start) {
        if (episode_start && recurrent)
            *mem = zero_memory<float>(1);
        NetOut<float> out =
            net.forward(params, obs.data.data(), 1, recurrent ? mem.get() : nullptr);
        if (greedy)
            return argmax_index(out.logits.data(), net.n_actions());
        return categorical_sample(out.logits.data(), net.n_actions(), *rng).action;
    };
}

std::vector<EpisodeStats> run_eval(const PolicyNet<float> &net, const Params &params,
                                   NavEnv &env, int n_episodes, double gamma, bool greedy,
                                   Rng &rng) {
    return run_episodes(env, make_net_policy(net, params, greedy, &rng), n_episodes, gamma);
}

double success_rate(const std::vector<EpisodeStats> &stats) {
    if (stats.empty())
        throw std::invalid_argument("success_rate: empty stats");
    double n = 0.0;
    for (const auto &s : stats)
        n += s.success ? 1.0 : 0.0;
    return n / static_cast<double>(stats.size());
}

std::optional<double> explained_variance(const std::vector<double> &pred,
                                         const std::vector<double> &target) {
    if (pred.size() != target.size())
        throw std::invalid_argument("explained_variance: length mismatch");
    if (pred.size() < 2)
        throw std::invalid_argument("explained_variance: need at least 2 points");
    const double n = static_cast<double>(target.size());
    double mt = 0.0, mr = 0.0;
    for (size_t i = 0; i < target.size(); ++i) {
        mt += target[i];
        mr += target[i] - pred[i];
    }
    mt /= n;
    mr /= n;
    double vt = 0.0, vr = 0.0;
    for (size_t i = 0; i < target.size(); ++i) {
        vt += (target[i] - mt) * (target[i] - mt);
        const double r = target[i] - pred[i];
        vr += (r - mr) * (r - mr);
    }
    vt /= n;
    vr /= n;
    if (vt < 1e-12)
        return std::nullopt;
    return 1.0 - vr / vt;
}

HeatmapGrid feature_heatmap(const Scene &scene, const PolarGrid &grid, FeatureKind kind,
                            int n_noise_draws, uint64_t seed) {
    if (n_noise_draws < 1)
        throw std::invalid_argument("feature_heatmap: need at least one draw");
    grid.validate(scene);
    const ArrayGeometry array = make_default_array(scene.carrier_freq_hz);
    HeatmapGrid hm;
    hm.kind = kind;
    hm.n_rings = grid.n_rings;
    hm.n_sectors = grid.n_sectors;
    hm.value.assign(grid.n_cells(), 0.0);
    hm.variance.assign(grid.n_cells(), 0.0);
    Rng rng = Rng::stream(seed, RngStream::eval, 0);
    for (int cell = 0; cell < grid.n_cells(); ++cell) {
        const Vec3 pos = cell_to_position(grid, grid.cell_from_index(cell));
        const IQObservation clean = synthesize_noise_free(scene, array, pos);
        double mean = 0.0, m2 = 0.0;
        for (int d = 0; d < n_noise_draws; ++d) {
            IQObservation noisy = clean;
            add_noise(noisy, scene.noise_power, rng);
            double ss = 0.0;
            if (kind == FeatureKind::raw_iq) {
                for (const auto &v : raw_tensor(noisy))
                    ss += v * v;
            } else {
                for (const auto &v : extract_features(noisy, kind).values)
                    ss += v * v;
            }
            const double norm = std::sqrt(ss);
            const double delta = norm - mean;
            mean += delta / (d + 1);
            m2 += delta * (norm - mean);
        }
        hm.value[cell] = mean;
        hm.variance[cell] = m2 / n_noise_draws;
        if (!std::isfinite(mean))
            throw std::runtime_error("feature_heatmap: non-finite cell value");
    }
    return hm;
}

void export_metrics(const std::filesystem::path &path,
                    const std::vector<nlohmann::json> &records) {
    std::string out;
    for (const auto &r : records) {
        out += r.dump();
        out += '\n';
    }
    io::atomic_write(path, out.data(), out.size());
}

void export_heatmap(const std::filesystem::path &path, const HeatmapGrid &hm,
                    const PolarGrid &grid) {
    if (hm.n_rings != grid.n_rings || hm.n_sectors != grid.n_sectors)
        throw std::invalid_argument("export_heatmap: grid shape mismatch");
    std::ostringstream os;
    os << "ring,sector,x,y,value,variance\n";
    os.precision(17);
    for (int cell = 0; cell < grid.n_cells(); ++cell) {
        const Cell c = grid.cell_from_index(cell);
        const Vec3 pos = cell_to_position(grid, c);
        os << c.ring << ',' << c.sector << ',' << pos.x << ',' << pos.y << ','
           << hm.value[cell] << ',' << hm.variance[cell] << '\n';
    }
    const std::string s = os.str();
    io::atomic_write(path, s.data(), s.size());
}

nlohmann::json episode_to_json(const EpisodeStats &s) {
    return {{"return", s.return_undiscounted},
            {"return_discounted", s.return_discounted},
            {"length", s.length},
            {"success", s.success},
            {"final_distance_m", s.final_distance_m},
            {"start_distance_m", s.start_distance_m}};
}

} // namespace rfseeker
