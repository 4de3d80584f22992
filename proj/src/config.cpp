// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors

#include "rfseeker/config.hpp"

#include "rfseeker/io.hpp"

#include <cstdint>
#include <cstdio>
#include <initializer_list>
#include <string>

namespace rfseeker {

using nlohmann::json;

const char *algo_name(Algo a) {
    switch (a) {
    case Algo::dqn:
        return "dqn";
    case Algo::dqn_recurrent:
        return "dqn_recurrent";
    case Algo::ppo:
        return "ppo";
    case Algo::ppo_recurrent:
        return "ppo_recurrent";
    }
    throw ConfigError("config: unknown algo enum value");
}

Algo algo_from_name(const std::string &name) {
    for (Algo a : {Algo::dqn, Algo::dqn_recurrent, Algo::ppo, Algo::ppo_recurrent})
        if (name == algo_name(a))
            return a;
    throw ConfigError("config: unknown algo \"" + name +
                      "\" (expected dqn, dqn_recurrent, ppo, or ppo_recurrent)");
}

namespace {

void check_object(const json &j, const char *block) {
    if (!j.is_object())
        throw ConfigError(std::string("config: \"") + block + "\" must be a JSON object");
}

void check_keys(const json &j, const char *block, std::initializer_list<const char *> allowed) {
    for (const auto &item : j.items()) {
        bool ok = false;
        for (const char *k : allowed)
            if (item.key() == k) {
                ok = true;
                break;
            }
        if (!ok)
            throw ConfigError("config: unknown key \"" + item.key() + "\" in \"" + block + "\"");
    }
}

// typed fetch with block context in the error message
template <typename T> void fetch(const json &j, const char *block, const char *key, T &out) {
    if (!j.contains(key))
        return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception &) {
        throw ConfigError(std::string("config: bad value for \"") + key + "\" in \"" + block +
                          "\"");
    }
}

Scene parse_scene(const json &j) {
    check_object(j, "scene");
    check_keys(j, "scene",
               {"hall_dims", "wall_reflectivity", "emitter_pos", "carrier_freq_hz",
                "bandwidth_hz", "max_reflection_order", "noise_power", "seed"});
    try {
        return scene_from_json(j);
    } catch (const std::exception &e) {
        throw ConfigError(std::string("config: scene: ") + e.what());
    }
}

PolarGrid parse_grid(const json &j) {
    check_object(j, "grid");
    check_keys(j, "grid",
               {"center", "n_rings", "n_sectors", "ring_spacing_m", "r_min_m", "agent_height_m"});
    PolarGrid g;
    if (j.contains("center")) {
        const auto &c = j.at("center");
        if (!c.is_array() || c.size() != 3)
            throw ConfigError("config: bad value for \"center\" in \"grid\"");
        try {
            g.center = {c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>()};
        } catch (const json::exception &) {
            throw ConfigError("config: bad value for \"center\" in \"grid\"");
        }
    }
    fetch(j, "grid", "n_rings", g.n_rings);
    fetch(j, "grid", "n_sectors", g.n_sectors);
    fetch(j, "grid", "ring_spacing_m", g.ring_spacing_m);
    fetch(j, "grid", "r_min_m", g.r_min_m);
    fetch(j, "grid", "agent_height_m", g.agent_height_m);
    return g;
}

RewardConfig parse_reward(const json &j) {
    check_object(j, "reward");
    check_keys(j, "reward", {"alpha", "lambda_step", "r_goal", "epsilon_m", "max_steps", "gamma"});
    RewardConfig r;
    fetch(j, "reward", "alpha", r.alpha);
    fetch(j, "reward", "lambda_step", r.lambda_step);
    fetch(j, "reward", "r_goal", r.r_goal);
    fetch(j, "reward", "epsilon_m", r.epsilon_m);
    fetch(j, "reward", "max_steps", r.max_steps);
    fetch(j, "reward", "gamma", r.gamma);
    return r;
}

DqnConfig parse_dqn(const json &j, const char *block, DqnConfig base) {
    check_keys(j, block,
               {"algo", "gamma", "lr", "target_sync_every", "eps_start", "eps_end",
                "eps_decay_fraction", "update_every", "learn_start", "total_steps", "batch_size",
                "replay_capacity", "seq_len", "snapshot_every", "checkpoint_every"});
    DqnConfig c = base;
    fetch(j, block, "gamma", c.gamma);
    fetch(j, block, "lr", c.lr);
    fetch(j, block, "target_sync_every", c.target_sync_every);
    fetch(j, block, "eps_start", c.eps_start);
    fetch(j, block, "eps_end", c.eps_end);
    fetch(j, block, "eps_decay_fraction", c.eps_decay_fraction);
    fetch(j, block, "update_every", c.update_every);
    fetch(j, block, "learn_start", c.learn_start);
    fetch(j, block, "total_steps", c.total_steps);
    fetch(j, block, "batch_size", c.batch_size);
    fetch(j, block, "replay_capacity", c.replay_capacity);
    fetch(j, block, "seq_len", c.seq_len);
    fetch(j, block, "snapshot_every", c.snapshot_every);
    fetch(j, block, "checkpoint_every", c.checkpoint_every);
    return c;
}

PpoConfig parse_ppo(const json &j, const char *block, PpoConfig base, bool allow_algo_key) {
    if (allow_algo_key)
        check_keys(j, block,
                   {"algo", "n_envs", "lr", "anneal_lr", "gamma", "gae_lambda", "clip", "ent_coef",
                    "vf_coef", "max_grad_norm", "minibatch", "epochs", "rollout_steps",
                    "total_steps", "snapshot_every", "checkpoint_every"});
    else
        check_keys(j, block,
                   {"n_envs", "lr", "anneal_lr", "gamma", "gae_lambda", "clip", "ent_coef",
                    "vf_coef", "max_grad_norm", "minibatch", "epochs", "rollout_steps",
                    "total_steps", "snapshot_every", "checkpoint_every"});
    PpoConfig c = base;
    fetch(j, block, "n_envs", c.n_envs);
    fetch(j, block, "lr", c.lr);
    fetch(j, block, "anneal_lr", c.anneal_lr);
    fetch(j, block, "gamma", c.gamma);
    fetch(j, block, "gae_lambda", c.gae_lambda);
    fetch(j, block, "clip", c.clip);
    fetch(j, block, "ent_coef", c.ent_coef);
    fetch(j, block, "vf_coef", c.vf_coef);
    fetch(j, block, "max_grad_norm", c.max_grad_norm);
    fetch(j, block, "minibatch", c.minibatch);
    fetch(j, block, "epochs", c.epochs);
    fetch(j, block, "rollout_steps", c.rollout_steps);
    fetch(j, block, "total_steps", c.total_steps);
    fetch(j, block, "snapshot_every", c.snapshot_every);
    fetch(j, block, "checkpoint_every", c.checkpoint_every);
    return c;
}

MetaConfig parse_meta(const json &j) {
    check_object(j, "meta");
    check_keys(j, "meta",
               {"meta_iters", "tasks_per_batch", "outer_lr", "critic_lr", "inner_lr",
                "inner_steps", "support_train_steps", "support_eval_episodes", "query_steps",
                "n_query_episodes", "checkpoint_every", "ppo"});
    MetaConfig m = MetaConfig::defaults();
    fetch(j, "meta", "meta_iters", m.meta_iters);
    fetch(j, "meta", "tasks_per_batch", m.tasks_per_batch);
    fetch(j, "meta", "outer_lr", m.outer_lr);
    fetch(j, "meta", "critic_lr", m.critic_lr);
    fetch(j, "meta", "inner_lr", m.inner_lr);
    fetch(j, "meta", "inner_steps", m.inner_steps);
    fetch(j, "meta", "support_train_steps", m.support_train_steps);
    fetch(j, "meta", "support_eval_episodes", m.support_eval_episodes);
    fetch(j, "meta", "query_steps", m.query_steps);
    fetch(j, "meta", "n_query_episodes", m.n_query_episodes);
    fetch(j, "meta", "checkpoint_every", m.checkpoint_every);
    if (j.contains("ppo")) {
        check_object(j.at("ppo"), "meta.ppo");
        m.ppo = parse_ppo(j.at("ppo"), "meta.ppo", m.ppo, false);
    }
    return m;
}

EvalBlock parse_eval(const json &j) {
    check_object(j, "eval");
    check_keys(j, "eval", {"n_episodes", "greedy", "heatmap_feature", "heatmap_draws"});
    EvalBlock e;
    fetch(j, "eval", "n_episodes", e.n_episodes);
    fetch(j, "eval", "greedy", e.greedy);
    fetch(j, "eval", "heatmap_feature", e.heatmap_feature);
    fetch(j, "eval", "heatmap_draws", e.heatmap_draws);
    return e;
}

SeedsBlock parse_seeds(const json &j) {
    check_object(j, "seeds");
    check_keys(j, "seeds", {"train", "eval"});
    // json silently wraps negative ints into uint64, so gate on the parsed type
    for (const char *k : {"train", "eval"})
        if (j.contains(k) && !j.at(k).is_number_unsigned())
            throw ConfigError(std::string("config: bad value for \"") + k +
                              "\" in \"seeds\" (must be an unsigned integer)");
    SeedsBlock s;
    fetch(j, "seeds", "train", s.train);
    fetch(j, "seeds", "eval", s.eval);
    return s;
}

bool is_recurrent(Algo a) { return a == Algo::dqn_recurrent || a == Algo::ppo_recurrent; }
bool is_dqn(Algo a) { return a == Algo::dqn || a == Algo::dqn_recurrent; }

} // namespace

Arch ExperimentConfig::arch() const {
    if (env.mode == ObservationMode::stats_goal) {
        if (is_recurrent(algo))
            throw ConfigError("config: recurrent agents require raw_iq observations");
        return Arch::ff_stats;
    }
    return is_recurrent(algo) ? Arch::recurrent_raw : Arch::ff_raw;
}

void ExperimentConfig::validate() const {
    try {
        env.validate();
        if (is_dqn(algo))
            dqn.validate();
        else
            ppo.validate();
        if (meta)
            meta->validate();
    } catch (const std::exception &e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    (void)arch(); // rejects recurrent + stats_goal
    if (is_dqn(algo)) {
        const bool wants_seq = is_recurrent(algo);
        if (wants_seq != (dqn.seq_len > 1))
            throw ConfigError("config: agent seq_len must be 1 for dqn and > 1 for "
                              "dqn_recurrent");
    }
    if (eval.n_episodes < 1)
        throw ConfigError("config: eval n_episodes must be positive");
    if (eval.heatmap_draws < 1)
        throw ConfigError("config: eval heatmap_draws must be positive");
    if (eval.heatmap_feature != "all") {
        FeatureKind k;
        try {
            k = feature_kind_from_name(eval.heatmap_feature);
        } catch (const std::exception &) {
            throw ConfigError("config: bad value for \"heatmap_feature\" in \"eval\"");
        }
        if (k == FeatureKind::raw_iq)
            throw ConfigError("config: heatmap_feature must be a statistics feature or \"all\"");
    }
    if (out_dir.empty())
        throw ConfigError("config: out_dir must be non-empty");
    if (normalizer_path && normalizer_path->empty())
        throw ConfigError("config: bad value for \"normalizer\" in \"observation\"");
}

ExperimentConfig config_from_json(const json &j) {
    check_object(j, "<top level>");
    check_keys(j, "<top level>",
               {"scene", "grid", "reward", "observation", "agent", "meta", "eval", "seeds",
                "out_dir"});
    ExperimentConfig cfg;
    if (j.contains("scene"))
        cfg.env.scene = parse_scene(j.at("scene"));
    if (j.contains("grid"))
        cfg.env.grid = parse_grid(j.at("grid"));
    if (j.contains("reward"))
        cfg.env.reward = parse_reward(j.at("reward"));
    if (j.contains("observation")) {
        const json &o = j.at("observation");
        check_object(o, "observation");
        check_keys(o, "observation", {"mode", "feature", "normalizer"});
        std::string mode = observation_mode_name(cfg.env.mode);
        std::string feature = feature_kind_name(cfg.env.feature);
        fetch(o, "observation", "mode", mode);
        fetch(o, "observation", "feature", feature);
        try {
            cfg.env.mode = observation_mode_from_name(mode);
            cfg.env.feature = feature_kind_from_name(feature);
        } catch (const std::exception &e) {
            throw ConfigError(std::string("config: observation: ") + e.what());
        }
        if (o.contains("normalizer")) {
            std::string p;
            fetch(o, "observation", "normalizer", p);
            cfg.normalizer_path = p;
        }
    }
    if (j.contains("agent")) {
        const json &a = j.at("agent");
        check_object(a, "agent");
        std::string name = algo_name(cfg.algo);
        fetch(a, "agent", "algo", name);
        cfg.algo = algo_from_name(name);
        if (is_dqn(cfg.algo)) {
            DqnConfig base = cfg.algo == Algo::dqn_recurrent ? DqnConfig::recurrent_defaults()
                                                             : DqnConfig::ff_defaults();
            cfg.dqn = parse_dqn(a, "agent", base);
        } else {
            cfg.ppo = parse_ppo(a, "agent", PpoConfig{}, true);
        }
    }
    if (j.contains("meta"))
        cfg.meta = parse_meta(j.at("meta"));
    if (j.contains("eval"))
        cfg.eval = parse_eval(j.at("eval"));
    if (j.contains("seeds"))
        cfg.seeds = parse_seeds(j.at("seeds"));
    fetch(j, "<top level>", "out_dir", cfg.out_dir);
    cfg.validate();
    return cfg;
}

json config_to_json(const ExperimentConfig &cfg) {
    json grid{{"center", {cfg.env.grid.center.x, cfg.env.grid.center.y, cfg.env.grid.center.z}},
              {"n_rings", cfg.env.grid.n_rings},
              {"n_sectors", cfg.env.grid.n_sectors},
              {"ring_spacing_m", cfg.env.grid.ring_spacing_m},
              {"r_min_m", cfg.env.grid.r_min_m},
              {"agent_height_m", cfg.env.grid.agent_height_m}};
    json reward{{"alpha", cfg.env.reward.alpha},
                {"lambda_step", cfg.env.reward.lambda_step},
                {"r_goal", cfg.env.reward.r_goal},
                {"epsilon_m", cfg.env.reward.epsilon_m},
                {"max_steps", cfg.env.reward.max_steps},
                {"gamma", cfg.env.reward.gamma}};
    json observation{{"mode", observation_mode_name(cfg.env.mode)},
                     {"feature", feature_kind_name(cfg.env.feature)}};
    if (cfg.normalizer_path)
        observation["normalizer"] = *cfg.normalizer_path;
    json agent{{"algo", algo_name(cfg.algo)}};
    if (is_dqn(cfg.algo)) {
        agent["gamma"] = cfg.dqn.gamma;
        agent["lr"] = cfg.dqn.lr;
        agent["target_sync_every"] = cfg.dqn.target_sync_every;
        agent["eps_start"] = cfg.dqn.eps_start;
        agent["eps_end"] = cfg.dqn.eps_end;
        agent["eps_decay_fraction"] = cfg.dqn.eps_decay_fraction;
        agent["update_every"] = cfg.dqn.update_every;
        agent["learn_start"] = cfg.dqn.learn_start;
        agent["total_steps"] = cfg.dqn.total_steps;
        agent["batch_size"] = cfg.dqn.batch_size;
        agent["replay_capacity"] = cfg.dqn.replay_capacity;
        agent["seq_len"] = cfg.dqn.seq_len;
        agent["snapshot_every"] = cfg.dqn.snapshot_every;
        agent["checkpoint_every"] = cfg.dqn.checkpoint_every;
    } else {
        agent["n_envs"] = cfg.ppo.n_envs;
        agent["lr"] = cfg.ppo.lr;
        agent["anneal_lr"] = cfg.ppo.anneal_lr;
        agent["gamma"] = cfg.ppo.gamma;
        agent["gae_lambda"] = cfg.ppo.gae_lambda;
        agent["clip"] = cfg.ppo.clip;
        agent["ent_coef"] = cfg.ppo.ent_coef;
        agent["vf_coef"] = cfg.ppo.vf_coef;
        agent["max_grad_norm"] = cfg.ppo.max_grad_norm;
        agent["minibatch"] = cfg.ppo.minibatch;
        agent["epochs"] = cfg.ppo.epochs;
        agent["rollout_steps"] = cfg.ppo.rollout_steps;
        agent["total_steps"] = cfg.ppo.total_steps;
        agent["snapshot_every"] = cfg.ppo.snapshot_every;
        agent["checkpoint_every"] = cfg.ppo.checkpoint_every;
    }
    json out{{"scene", scene_to_json(cfg.env.scene)},
             {"grid", grid},
             {"reward", reward},
             {"observation", observation},
             {"agent", agent},
             {"eval",
              {{"n_episodes", cfg.eval.n_episodes},
               {"greedy", cfg.eval.greedy},
               {"heatmap_feature", cfg.eval.heatmap_feature},
               {"heatmap_draws", cfg.eval.heatmap_draws}}},
             {"seeds", {{"train", cfg.seeds.train}, {"eval", cfg.seeds.eval}}},
             {"out_dir", cfg.out_dir}};
    if (cfg.meta) {
        const MetaConfig &m = *cfg.meta;
        out["meta"] = json{{"meta_iters", m.meta_iters},
                           {"tasks_per_batch", m.tasks_per_batch},
                           {"outer_lr", m.outer_lr},
                           {"critic_lr", m.critic_lr},
                           {"inner_lr", m.inner_lr},
                           {"inner_steps", m.inner_steps},
                           {"support_train_steps", m.support_train_steps},
                           {"support_eval_episodes", m.support_eval_episodes},
                           {"query_steps", m.query_steps},
                           {"n_query_episodes", m.n_query_episodes},
                           {"checkpoint_every", m.checkpoint_every},
                           {"ppo",
                            {{"n_envs", m.ppo.n_envs},
                             {"lr", m.ppo.lr},
                             {"anneal_lr", m.ppo.anneal_lr},
                             {"gamma", m.ppo.gamma},
                             {"gae_lambda", m.ppo.gae_lambda},
                             {"clip", m.ppo.clip},
                             {"ent_coef", m.ppo.ent_coef},
                             {"vf_coef", m.ppo.vf_coef},
                             {"max_grad_norm", m.ppo.max_grad_norm},
                             {"minibatch", m.ppo.minibatch},
                             {"epochs", m.ppo.epochs},
                             {"rollout_steps", m.ppo.rollout_steps},
                             {"total_steps", m.ppo.total_steps},
                             {"snapshot_every", m.ppo.snapshot_every},
                             {"checkpoint_every", m.ppo.checkpoint_every}}}};
    }
    return out;
}

ExperimentConfig load_config(const std::filesystem::path &path) {
    std::string text;
    try {
        text = io::read_text(path);
    } catch (const std::exception &e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception &e) {
        throw ConfigError("config: " + path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

std::string config_hash(const ExperimentConfig &cfg) {
    json j = config_to_json(cfg);
    j.erase("out_dir"); // identifies the experiment, not where it lands
    const std::string dump = j.dump();
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

} // namespace rfseeker
