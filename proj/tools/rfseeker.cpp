// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors
//
// Command-line driver. Every command is a pure function of (config, seeds):
// re-running reproduces all outputs byte for byte except manifest.json,
// which is the only artifact that carries a timestamp.

#include "rfseeker/agent_dqn.hpp"
#include "rfseeker/agent_ppo.hpp"
#include "rfseeker/checkpoint.hpp"
#include "rfseeker/config.hpp"
#include "rfseeker/eval_report.hpp"
#include "rfseeker/io.hpp"
#include "rfseeker/meta_anil.hpp"
#include "rfseeker/threads.hpp"

#include <cstdio>
#include <ctime>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rfseeker;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CliArgs {
    std::string command;
    fs::path config;
    std::optional<fs::path> checkpoint;
    std::optional<std::string> out;
    std::optional<uint64_t> seed;
};

const char *kUsage =
    "usage: rfseeker <simulate|train|meta-train|eval|heatmap> --config <path>\n"
    "                [--checkpoint <path>] [--out <dir>] [--seed <u64>]\n"
    "environment: RFSEEKER_THREADS caps worker threads\n";

CliArgs parse_cli(int argc, char **argv) {
    if (argc < 2)
        throw UsageError("missing command");
    CliArgs a;
    a.command = argv[1];
    const bool known = a.command == "simulate" || a.command == "train" ||
                       a.command == "meta-train" || a.command == "eval" ||
                       a.command == "heatmap";
    if (!known)
        throw UsageError("unknown command \"" + a.command + "\"");
    for (int i = 2; i < argc; ++i) {
        const std::string flag = argv[i];
        auto value = [&]() -> std::string {
            if (i + 1 >= argc)
                throw UsageError("flag " + flag + " needs a value");
            return argv[++i];
        };
        if (flag == "--config")
            a.config = value();
        else if (flag == "--checkpoint")
            a.checkpoint = fs::path(value());
        else if (flag == "--out")
            a.out = value();
        else if (flag == "--seed") {
            const std::string v = value();
            try {
                size_t pos = 0;
                a.seed = std::stoull(v, &pos);
                if (pos != v.size())
                    throw std::invalid_argument(v);
            } catch (const std::exception &) {
                throw UsageError("--seed needs an unsigned integer, got \"" + v + "\"");
            }
        } else {
            throw UsageError("unknown flag \"" + flag + "\"");
        }
    }
    if (a.config.empty())
        throw UsageError("--config is required");
    return a;
}

// resolved config and manifest land in every output directory
void write_run_files(const fs::path &out, const std::string &command, const CliArgs &cli,
                     const ExperimentConfig &cfg) {
    fs::create_directories(out);
    const fs::path resolved = out / "resolved_config.json";
    std::error_code ec;
    if (fs::exists(resolved) && fs::equivalent(resolved, cli.config, ec) && !ec)
        throw ConfigError("config: refusing to overwrite the input config at " +
                          resolved.string());
    io::atomic_write(resolved, config_to_json(cfg).dump(2) + "\n");
    json manifest{{"command", command},
                  {"config_hash", config_hash(cfg)},
                  {"created_unix", static_cast<int64_t>(std::time(nullptr))}};
    io::atomic_write(out / "manifest.json", manifest.dump(2) + "\n");
}

std::vector<std::vector<double>> observation_rows(const ExperimentConfig &cfg,
                                                  const std::vector<IQObservation> &cells) {
    const bool raw = cfg.env.mode == ObservationMode::raw_iq;
    std::vector<std::vector<double>> rows;
    rows.reserve(cells.size());
    for (const IQObservation &obs : cells)
        rows.push_back(raw ? raw_tensor(obs) : extract_features(obs, cfg.env.feature).values);
    return rows;
}

Normalizer fit_grid_normalizer(const ExperimentConfig &cfg,
                               const std::vector<IQObservation> &cells) {
    const bool raw = cfg.env.mode == ObservationMode::raw_iq;
    const size_t channels = raw ? static_cast<size_t>(2 * IQObservation::kAntennas)
                                : static_cast<size_t>(IQObservation::kAntennas) *
                                      static_cast<size_t>(feature_dim(cfg.env.feature));
    const std::string label =
        raw ? "raw_iq" : std::string("stats_goal/") + feature_kind_name(cfg.env.feature);
    return fit_normalizer(observation_rows(cfg, cells), channels, label);
}

std::vector<IQObservation> synthesize_grid_cells(const ExperimentConfig &cfg) {
    ArrayGeometry array = make_default_array(cfg.env.scene.carrier_freq_hz);
    Rng rng = Rng::stream(cfg.seeds.train, RngStream::dataset);
    std::vector<IQObservation> cells;
    cells.reserve(static_cast<size_t>(cfg.env.grid.n_cells()));
    for (int idx = 0; idx < cfg.env.grid.n_cells(); ++idx) {
        Vec3 pos = cell_to_position(cfg.env.grid, cfg.env.grid.cell_from_index(idx));
        cells.push_back(synthesize_iq(cfg.env.scene, array, pos, rng));
    }
    return cells;
}

// Load the normalizer named in the config, or fit one from a deterministic
// one-draw-per-cell pass and save it next to the other run artifacts.
std::shared_ptr<const Normalizer> resolve_normalizer(const ExperimentConfig &cfg,
                                                     const fs::path &out) {
    if (cfg.normalizer_path)
        return std::make_shared<Normalizer>(load_normalizer(*cfg.normalizer_path));
    Normalizer norm = fit_grid_normalizer(cfg, synthesize_grid_cells(cfg));
    save_normalizer(norm, out / "normalizer.json");
    return std::make_shared<Normalizer>(std::move(norm));
}

EnvFactory make_env_factory(const ExperimentConfig &cfg,
                            std::shared_ptr<const Normalizer> norm) {
    NavEnvConfig env = cfg.env;
    const uint64_t seed = cfg.seeds.train;
    return [env, norm, seed](int instance) {
        return std::make_unique<NavEnv>(env, norm, seed, static_cast<uint64_t>(instance));
    };
}

int cmd_simulate(const CliArgs &cli, const ExperimentConfig &cfg) {
    const fs::path out = cfg.out_dir;
    write_run_files(out, "simulate", cli, cfg);

    std::vector<Vec3> positions;
    positions.reserve(static_cast<size_t>(cfg.env.grid.n_cells()));
    for (int idx = 0; idx < cfg.env.grid.n_cells(); ++idx)
        positions.push_back(cell_to_position(cfg.env.grid, cfg.env.grid.cell_from_index(idx)));

    json grid_meta{{"grid",
                    {{"center", {cfg.env.grid.center.x, cfg.env.grid.center.y,
                                 cfg.env.grid.center.z}},
                     {"n_rings", cfg.env.grid.n_rings},
                     {"n_sectors", cfg.env.grid.n_sectors},
                     {"ring_spacing_m", cfg.env.grid.ring_spacing_m},
                     {"r_min_m", cfg.env.grid.r_min_m},
                     {"agent_height_m", cfg.env.grid.agent_height_m}}},
                   {"seed", cfg.seeds.train}};

    ArrayGeometry array = make_default_array(cfg.env.scene.carrier_freq_hz);
    Rng rng = Rng::stream(cfg.seeds.train, RngStream::dataset);
    const fs::path dataset_path = out / "dataset.rfgrid";
    export_grid_dataset(cfg.env.scene, array, positions, grid_meta, rng, dataset_path);

    GridDataset ds = load_grid_dataset(dataset_path);
    Normalizer norm = fit_grid_normalizer(cfg, ds.cells);
    save_normalizer(norm, out / "normalizer.json");

    std::printf("simulate: %d cells -> %s\n", cfg.env.grid.n_cells(),
                dataset_path.string().c_str());
    std::printf("simulate: normalizer (%zu channels) -> %s\n", norm.channels(),
                (out / "normalizer.json").string().c_str());
    return 0;
}

CheckpointMeta make_meta(const ExperimentConfig &cfg, Arch arch, int obs_dim, int64_t opt_step,
                         int64_t train_steps) {
    CheckpointMeta meta;
    meta.arch = arch;
    meta.obs_dim = obs_dim;
    meta.n_actions = kNumActions;
    meta.opt_step = opt_step;
    meta.train_steps = train_steps;
    meta.config_hash = config_hash(cfg);
    meta.extra = json{{"algo", algo_name(cfg.algo)}};
    return meta;
}

std::optional<TrainStart> load_start(const std::optional<fs::path> &path) {
    if (!path)
        return std::nullopt;
    Checkpoint ck = load_checkpoint(*path);
    TrainStart s;
    s.params = std::move(ck.params);
    s.opt = ck.opt ? std::move(*ck.opt) : make_adam_state(s.params);
    s.steps = ck.meta.train_steps;
    return s;
}

int cmd_train(const CliArgs &cli, const ExperimentConfig &cfg) {
    const fs::path out = cfg.out_dir;
    write_run_files(out, "train", cli, cfg);

    std::shared_ptr<const Normalizer> norm = resolve_normalizer(cfg, out);
    EnvFactory factory = make_env_factory(cfg, norm);
    const Arch arch = cfg.arch();
    const int obs_dim = static_cast<int>(observation_size(cfg.env.mode, cfg.env.feature));

    std::vector<json> metrics;
    TrainHooks hooks;
    hooks.on_metric = [&metrics](const json &rec) { metrics.push_back(rec); };
    hooks.on_checkpoint = [&](int64_t step, const Params &p, const AdamState<float> &opt) {
        save_checkpoint(out / ("checkpoint_" + std::to_string(step) + ".ckpt"), p, &opt,
                        make_meta(cfg, arch, obs_dim, opt.step, step));
    };

    std::optional<TrainStart> start = load_start(cli.checkpoint);
    const bool dqn_family = cfg.algo == Algo::dqn || cfg.algo == Algo::dqn_recurrent;
    TrainResult res = dqn_family
                          ? train_dqn(factory, arch, cfg.dqn, cfg.seeds.train, hooks,
                                      start ? &*start : nullptr)
                          : train_ppo(factory, arch, cfg.ppo, cfg.seeds.train, hooks,
                                      start ? &*start : nullptr);

    save_checkpoint(out / "final.ckpt", res.params, &res.opt,
                    make_meta(cfg, arch, obs_dim, res.opt.step, res.steps));
    export_metrics(out / "metrics.jsonl", metrics);

    std::printf("train: %s, %lld steps, %lld episodes -> %s\n", algo_name(cfg.algo),
                static_cast<long long>(res.steps), static_cast<long long>(res.episodes),
                out.string().c_str());
    return 0;
}

int cmd_meta_train(const CliArgs &cli, const ExperimentConfig &cfg) {
    if (!cfg.meta)
        throw ConfigError("config: meta-train needs a \"meta\" block");
    if (cfg.algo == Algo::dqn || cfg.algo == Algo::dqn_recurrent)
        throw ConfigError("config: meta-train needs a ppo-family agent");
    const fs::path out = cfg.out_dir;
    write_run_files(out, "meta-train", cli, cfg);

    std::shared_ptr<const Normalizer> norm = resolve_normalizer(cfg, out);
    MetaContext ctx;
    ctx.base_env = cfg.env;
    ctx.normalizer = norm;
    const Arch arch = cfg.arch();
    const int obs_dim = static_cast<int>(observation_size(cfg.env.mode, cfg.env.feature));

    std::vector<json> metrics;
    TrainHooks hooks;
    hooks.on_metric = [&metrics](const json &rec) { metrics.push_back(rec); };
    hooks.on_checkpoint = [&](int64_t it, const Params &p, const AdamState<float> &opt) {
        save_checkpoint(out / ("meta_checkpoint_" + std::to_string(it) + ".ckpt"), p, &opt,
                        make_meta(cfg, arch, obs_dim, opt.step, it));
    };

    std::optional<TrainStart> start = load_start(cli.checkpoint);
    MetaTrainResult res = meta_train(ctx, arch, *cfg.meta, cfg.seeds.train, hooks,
                                     start ? &*start : nullptr);

    save_checkpoint(out / "meta_final.ckpt", res.params, &res.opt,
                    make_meta(cfg, arch, obs_dim, res.opt.step, res.meta_iters));
    export_metrics(out / "metrics.jsonl", metrics);

    std::printf("meta-train: %lld iterations -> %s\n",
                static_cast<long long>(res.meta_iters), out.string().c_str());
    return 0;
}

int cmd_eval(const CliArgs &cli, const ExperimentConfig &cfg) {
    if (!cli.checkpoint)
        throw UsageError("eval needs --checkpoint");
    const fs::path out = cfg.out_dir;
    write_run_files(out, "eval", cli, cfg);

    Checkpoint ck = load_checkpoint(*cli.checkpoint);
    const int obs_dim = static_cast<int>(observation_size(cfg.env.mode, cfg.env.feature));
    if (ck.meta.obs_dim != obs_dim)
        throw ConfigError("config: checkpoint observation size " +
                          std::to_string(ck.meta.obs_dim) + " does not match the config (" +
                          std::to_string(obs_dim) + ")");
    PolicyNet<float> net(ck.meta.arch, ck.meta.obs_dim, ck.meta.n_actions);

    std::shared_ptr<const Normalizer> norm = resolve_normalizer(cfg, out);
    NavEnv env(cfg.env, norm, cfg.seeds.eval, 0);
    Rng rng = Rng::stream(cfg.seeds.eval, RngStream::eval);
    std::vector<EpisodeStats> stats = run_eval(net, ck.params, env, cfg.eval.n_episodes,
                                               cfg.env.reward.gamma, cfg.eval.greedy, rng);

    std::vector<json> episodes;
    episodes.reserve(stats.size());
    double mean_ret = 0.0, mean_disc = 0.0, mean_len = 0.0, mean_final = 0.0;
    for (const EpisodeStats &s : stats) {
        episodes.push_back(episode_to_json(s));
        mean_ret += s.return_undiscounted;
        mean_disc += s.return_discounted;
        mean_len += s.length;
        mean_final += s.final_distance_m;
    }
    const double n = static_cast<double>(stats.size());
    const double sr = success_rate(stats);
    json summary{{"n_episodes", stats.size()},
                 {"success_rate", sr},
                 {"mean_return", mean_ret / n},
                 {"mean_return_discounted", mean_disc / n},
                 {"mean_length", mean_len / n},
                 {"mean_final_distance_m", mean_final / n},
                 {"greedy", cfg.eval.greedy},
                 {"checkpoint_train_steps", ck.meta.train_steps}};
    export_metrics(out / "eval_episodes.jsonl", episodes);
    io::atomic_write(out / "eval_summary.json", summary.dump(2) + "\n");

    std::printf("eval: %d episodes, success rate %.3f, mean return %.3f -> %s\n",
                cfg.eval.n_episodes, sr, mean_ret / n, out.string().c_str());
    return 0;
}

int cmd_heatmap(const CliArgs &cli, const ExperimentConfig &cfg) {
    const fs::path out = cfg.out_dir;
    write_run_files(out, "heatmap", cli, cfg);

    std::vector<FeatureKind> kinds;
    if (cfg.eval.heatmap_feature == "all")
        kinds = {FeatureKind::mean, FeatureKind::std_dev, FeatureKind::rms,
                 FeatureKind::phase_diff};
    else
        kinds = {feature_kind_from_name(cfg.eval.heatmap_feature)};

    for (FeatureKind k : kinds) {
        HeatmapGrid hm = feature_heatmap(cfg.env.scene, cfg.env.grid, k, cfg.eval.heatmap_draws,
                                         cfg.seeds.eval);
        const fs::path path = out / (std::string("heatmap_") + feature_kind_name(k) + ".csv");
        export_heatmap(path, hm, cfg.env.grid);
        std::printf("heatmap: %s -> %s\n", feature_kind_name(k), path.string().c_str());
    }
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    try {
        init_threads();
        CliArgs cli = parse_cli(argc, argv);
        ExperimentConfig cfg = load_config(cli.config);
        if (cli.out)
            cfg.out_dir = *cli.out;
        if (cli.seed) {
            cfg.seeds.train = *cli.seed;
            cfg.seeds.eval = *cli.seed;
        }
        cfg.validate();

        if (cli.command == "simulate")
            return cmd_simulate(cli, cfg);
        if (cli.command == "train")
            return cmd_train(cli, cfg);
        if (cli.command == "meta-train")
            return cmd_meta_train(cli, cfg);
        if (cli.command == "eval")
            return cmd_eval(cli, cfg);
        return cmd_heatmap(cli, cfg);
    } catch (const UsageError &e) {
        std::fprintf(stderr, "rfseeker: %s\n%s", e.what(), kUsage);
        return 2;
    } catch (const ConfigError &e) {
        std::fprintf(stderr, "rfseeker: %s\n", e.what());
        return 2;
    } catch (const std::exception &e) {
        std::fprintf(stderr, "rfseeker: %s\n", e.what());
        return 3;
    }
}
