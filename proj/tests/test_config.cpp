// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors

#include "rfseeker/config.hpp"

#include "rfseeker/io.hpp"

#include <cstdlib>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "doctest.h"
#include "json.hpp"

using namespace rfseeker;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json minimal_config() {
    return json{{"agent", {{"algo", "ppo"}}}};
}

// message must mention both the offending key and its block
void expect_unknown_key(json cfg, const std::string &key, const std::string &block) {
    try {
        config_from_json(cfg);
        FAIL("expected ConfigError for key ", key, " in ", block);
    } catch (const ConfigError &e) {
        const std::string msg = e.what();
        CHECK(msg.find(key) != std::string::npos);
        CHECK(msg.find(block) != std::string::npos);
    }
}

} // namespace

TEST_CASE("config: defaults fill every field and round-trip") {
    ExperimentConfig cfg = config_from_json(minimal_config());
    CHECK(cfg.algo == Algo::ppo);
    CHECK(cfg.env.scene.hall_dims.x == doctest::Approx(40.0));
    CHECK(cfg.env.grid.n_rings == 8);
    CHECK(cfg.env.grid.n_sectors == 16);
    CHECK(cfg.env.reward.max_steps == 128);
    CHECK(cfg.env.mode == ObservationMode::stats_goal);
    CHECK(cfg.env.feature == FeatureKind::phase_diff);
    CHECK(cfg.ppo.lr == doctest::Approx(2.5e-4));
    CHECK(cfg.ppo.gamma == doctest::Approx(0.997));
    CHECK(cfg.eval.n_episodes == 500);
    CHECK(cfg.seeds.train == 1);
    CHECK_FALSE(cfg.meta.has_value());

    json resolved = config_to_json(cfg);
    ExperimentConfig back = config_from_json(resolved);
    CHECK(config_to_json(back).dump() == resolved.dump());
    // resolved form spells out the defaulted hyperparameters
    CHECK(resolved.at("agent").at("lr").get<double>() == doctest::Approx(2.5e-4));
    CHECK(resolved.at("scene").at("carrier_freq_hz").get<double>() ==
          doctest::Approx(1.57542e9));
    CHECK(resolved.at("reward").at("gamma").get<double>() == doctest::Approx(0.99));
}

TEST_CASE("config: unknown keys are rejected naming key and block") {
    json base = minimal_config();

    json top = base;
    top["typo_block"] = 1;
    expect_unknown_key(top, "typo_block", "top level");

    json scene = base;
    scene["scene"] = {{"hall_dimz", {40, 30, 8}}};
    expect_unknown_key(scene, "hall_dimz", "scene");

    json grid = base;
    grid["grid"] = {{"n_ringz", 4}};
    expect_unknown_key(grid, "n_ringz", "grid");

    json reward = base;
    reward["reward"] = {{"alpha_", 1.0}};
    expect_unknown_key(reward, "alpha_", "reward");

    json obs = base;
    obs["observation"] = {{"modes", "stats_goal"}};
    expect_unknown_key(obs, "modes", "observation");

    json agent = base;
    agent["agent"] = {{"algo", "ppo"}, {"learning_rate", 1e-3}};
    expect_unknown_key(agent, "learning_rate", "agent");

    json agent_dqn = base;
    agent_dqn["agent"] = {{"algo", "dqn"}, {"clip", 0.1}}; // ppo key on a dqn agent
    expect_unknown_key(agent_dqn, "clip", "agent");

    json meta = base;
    meta["meta"] = {{"meta_iterations", 5}};
    expect_unknown_key(meta, "meta_iterations", "meta");

    json meta_ppo = base;
    meta_ppo["meta"] = {{"ppo", {{"algo", "ppo"}}}}; // algo only valid in the agent block
    expect_unknown_key(meta_ppo, "algo", "meta.ppo");

    json ev = base;
    ev["eval"] = {{"episodes", 10}};
    expect_unknown_key(ev, "episodes", "eval");

    json seeds = base;
    seeds["seeds"] = {{"training", 1}};
    expect_unknown_key(seeds, "training", "seeds");
}

TEST_CASE("config: algo names and architecture mapping") {
    for (Algo a : {Algo::dqn, Algo::dqn_recurrent, Algo::ppo, Algo::ppo_recurrent})
        CHECK(algo_from_name(algo_name(a)) == a);
    CHECK_THROWS_AS(algo_from_name("sarsa"), ConfigError);

    json stats_ppo = minimal_config();
    CHECK(config_from_json(stats_ppo).arch() == Arch::ff_stats);

    json raw_ppo{{"observation", {{"mode", "raw_iq"}, {"feature", "raw_iq"}}},
                 {"agent", {{"algo", "ppo"}}}};
    CHECK(config_from_json(raw_ppo).arch() == Arch::ff_raw);

    json raw_rec = raw_ppo;
    raw_rec["agent"]["algo"] = "ppo_recurrent";
    CHECK(config_from_json(raw_rec).arch() == Arch::recurrent_raw);

    // recurrent agents have no stats-mode network
    json stats_rec{{"agent", {{"algo", "ppo_recurrent"}}}};
    CHECK_THROWS_AS(config_from_json(stats_rec), ConfigError);

    // raw mode requires the raw feature
    json mismatched{{"observation", {{"mode", "raw_iq"}, {"feature", "phase_diff"}}},
                    {"agent", {{"algo", "ppo"}}}};
    CHECK_THROWS_AS(config_from_json(mismatched), ConfigError);
}

TEST_CASE("config: dqn family defaults and seq_len consistency") {
    json dqn_rec{{"observation", {{"mode", "raw_iq"}, {"feature", "raw_iq"}}},
                 {"agent", {{"algo", "dqn_recurrent"}}}};
    ExperimentConfig cfg = config_from_json(dqn_rec);
    CHECK(cfg.dqn.seq_len == 8);
    CHECK(cfg.dqn.replay_capacity == 5000);
    CHECK(cfg.dqn.batch_size == 32);
    CHECK(cfg.dqn.learn_start == 5000);

    json dqn_ff{{"agent", {{"algo", "dqn"}}}};
    ExperimentConfig ff = config_from_json(dqn_ff);
    CHECK(ff.dqn.seq_len == 1);
    CHECK(ff.dqn.replay_capacity == 50000);
    CHECK(ff.dqn.batch_size == 128);
    CHECK(ff.dqn.learn_start == 10000);

    json bad_ff = dqn_ff;
    bad_ff["agent"]["seq_len"] = 4;
    CHECK_THROWS_AS(config_from_json(bad_ff), ConfigError);

    json bad_rec = dqn_rec;
    bad_rec["agent"]["seq_len"] = 1;
    CHECK_THROWS_AS(config_from_json(bad_rec), ConfigError);
}

TEST_CASE("config: meta block defaults and overrides") {
    json j = minimal_config();
    j["meta"] = {{"meta_iters", 10}, {"ppo", {{"rollout_steps", 16}, {"minibatch", 16}}}};
    ExperimentConfig cfg = config_from_json(j);
    REQUIRE(cfg.meta.has_value());
    CHECK(cfg.meta->meta_iters == 10);
    CHECK(cfg.meta->tasks_per_batch == 3);
    CHECK(cfg.meta->outer_lr == doctest::Approx(1e-4));
    CHECK(cfg.meta->inner_lr == doctest::Approx(3e-3));
    // meta defaults deviate from the plain ppo ones
    CHECK(cfg.meta->ppo.n_envs == 1);
    CHECK(cfg.meta->ppo.vf_coef == doctest::Approx(0.4));
    CHECK(cfg.meta->ppo.rollout_steps == 16);
    // and survive the round trip
    ExperimentConfig back = config_from_json(config_to_json(cfg));
    REQUIRE(back.meta.has_value());
    CHECK(back.meta->ppo.vf_coef == doctest::Approx(0.4));
    CHECK(config_to_json(back).dump() == config_to_json(cfg).dump());
}

TEST_CASE("config: bad values surface as ConfigError with context") {
    json bad_type = minimal_config();
    bad_type["grid"] = {{"n_rings", "eight"}};
    CHECK_THROWS_WITH_AS(config_from_json(bad_type),
                         doctest::Contains("n_rings"), ConfigError);

    json bad_range = minimal_config();
    bad_range["grid"] = {{"n_rings", 40}}; // outermost ring leaves the hall
    CHECK_THROWS_AS(config_from_json(bad_range), ConfigError);

    json bad_algo_cfg = minimal_config();
    bad_algo_cfg["agent"]["gae_lambda"] = 1.5;
    CHECK_THROWS_AS(config_from_json(bad_algo_cfg), ConfigError);

    json bad_seed = minimal_config();
    bad_seed["seeds"] = {{"train", -3}};
    CHECK_THROWS_WITH_AS(config_from_json(bad_seed), doctest::Contains("train"), ConfigError);

    json bad_heatmap = minimal_config();
    bad_heatmap["eval"] = {{"heatmap_feature", "spectrogram"}};
    CHECK_THROWS_AS(config_from_json(bad_heatmap), ConfigError);

    json raw_heatmap = minimal_config();
    raw_heatmap["eval"] = {{"heatmap_feature", "raw_iq"}};
    CHECK_THROWS_AS(config_from_json(raw_heatmap), ConfigError);
}

TEST_CASE("config: hash tracks the experiment, not the output directory") {
    ExperimentConfig a = config_from_json(minimal_config());
    ExperimentConfig b = a;
    b.out_dir = "somewhere/else";
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);

    ExperimentConfig c = a;
    c.ppo.lr = 1e-3;
    CHECK(config_hash(a) != config_hash(c));
    ExperimentConfig d = a;
    d.seeds.train = 999;
    CHECK(config_hash(a) != config_hash(d));
}

TEST_CASE("config: load_config maps file and parse problems to ConfigError") {
    CHECK_THROWS_AS(load_config("/definitely/not/here.json"), ConfigError);

    fs::path dir = fs::temp_directory_path() /
                   ("rfseeker_cfg_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const fs::path bad = dir / "bad.json";
    io::atomic_write(bad, "{ not json");
    CHECK_THROWS_AS(load_config(bad), ConfigError);

    const fs::path good = dir / "good.json";
    io::atomic_write(good, minimal_config().dump());
    ExperimentConfig cfg = load_config(good);
    CHECK(cfg.algo == Algo::ppo);
    fs::remove_all(dir);
}
