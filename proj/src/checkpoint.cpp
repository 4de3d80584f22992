// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors

#include "rfseeker/checkpoint.hpp"

#include "rfseeker/io.hpp"
#include "rfseeker/net.hpp"
#include "rfseeker/version.hpp"

#include <cstring>

namespace rfseeker {

namespace {

constexpr char kMagic[8] = {'R', 'F', 'S', 'K', 'C', 'K', 'P', 'T'};

void put_params(std::vector<uint8_t> &buf, const Params &p) {
    for (const auto &b : p.blocks)
        for (const auto &t : b.tensors)
            io::put_bytes(buf, t.data.data(), t.size() * sizeof(float));
}

void get_params(const std::vector<uint8_t> &buf, size_t &pos, Params &p) {
    for (auto &b : p.blocks)
        for (auto &t : b.tensors)
            io::get_bytes(buf, pos, t.data.data(), t.size() * sizeof(float));
}

nlohmann::json shape_manifest(const Params &p) {
    nlohmann::json blocks = nlohmann::json::array();
    for (const auto &b : p.blocks) {
        nlohmann::json tensors = nlohmann::json::array();
        for (const auto &t : b.tensors)
            tensors.push_back({{"name", t.name}, {"shape", t.shape}});
        blocks.push_back({{"name", b.name}, {"tensors", tensors}});
    }
    return blocks;
}

Params params_from_manifest(const nlohmann::json &j) {
    Params p;
    p.arch = arch_from_name(j.at("arch").get<std::string>());
    p.obs_dim = j.at("obs_dim").get<int>();
    p.n_actions = j.at("n_actions").get<int>();
    for (const auto &jb : j.at("blocks")) {
        Block<float> b;
        b.name = jb.at("name").get<std::string>();
        for (const auto &jt : jb.at("tensors")) {
            Tensor<float> t;
            t.name = jt.at("name").get<std::string>();
            t.shape = jt.at("shape").get<std::vector<int>>();
            size_t n = 1;
            for (int d : t.shape) {
                if (d < 1)
                    throw std::runtime_error("checkpoint: bad tensor shape");
                n *= static_cast<size_t>(d);
            }
            t.data.assign(n, 0.0f);
            b.tensors.push_back(std::move(t));
        }
        p.blocks.push_back(std::move(b));
    }
    return p;
}

} // namespace

void save_checkpoint(const std::filesystem::path &path, const Params &params,
                     const AdamState<float> *opt, const CheckpointMeta &meta) {
    if (opt && !same_shape(params, opt->m))
        throw std::invalid_argument("checkpoint: optimizer state does not match params");

    nlohmann::json j{{"arch", arch_name(params.arch)},
                     {"obs_dim", params.obs_dim},
                     {"n_actions", params.n_actions},
                     {"opt_step", opt ? opt->step : meta.opt_step},
                     {"train_steps", meta.train_steps},
                     {"config_hash", meta.config_hash},
                     {"extra", meta.extra},
                     {"blocks", shape_manifest(params)},
                     {"has_opt", opt != nullptr}};
    std::string header = j.dump();

    std::vector<uint8_t> buf;
    io::put_bytes(buf, kMagic, sizeof(kMagic));
    io::put_u32(buf, static_cast<uint32_t>(kCheckpointFormatVersion));
    io::put_u64(buf, header.size());
    io::put_bytes(buf, header.data(), header.size());
    put_params(buf, params);
    if (opt) {
        put_params(buf, opt->m);
        put_params(buf, opt->v);
    }
    io::atomic_write(path, buf.data(), buf.size());
}

Checkpoint load_checkpoint(const std::filesystem::path &path) {
    std::vector<uint8_t> buf = io::read_all(path);
    size_t pos = 0;
    char magic[8];
    io::get_bytes(buf, pos, magic, sizeof(magic));
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("checkpoint: bad magic in " + path.string());
    uint32_t version = io::get_u32(buf, pos);
    if (version != static_cast<uint32_t>(kCheckpointFormatVersion))
        throw std::runtime_error("checkpoint: unsupported format version " +
                                 std::to_string(version));
    uint64_t hlen = io::get_u64(buf, pos);
    if (pos + hlen > buf.size())
        throw std::runtime_error("checkpoint: truncated header in " + path.string());
    nlohmann::json j = nlohmann::json::parse(buf.begin() + static_cast<long>(pos),
                                             buf.begin() + static_cast<long>(pos + hlen));
    pos += hlen;

    Checkpoint ck;
    ck.params = params_from_manifest(j);
    get_params(buf, pos, ck.params);
    ck.meta.arch = ck.params.arch;
    ck.meta.obs_dim = ck.params.obs_dim;
    ck.meta.n_actions = ck.params.n_actions;
    ck.meta.opt_step = j.at("opt_step").get<int64_t>();
    ck.meta.train_steps = j.at("train_steps").get<int64_t>();
    ck.meta.config_hash = j.value("config_hash", "");
    ck.meta.extra = j.value("extra", nlohmann::json::object());
    if (j.at("has_opt").get<bool>()) {
        AdamState<float> s;
        s.m = zeros_like(ck.params);
        s.v = zeros_like(ck.params);
        get_params(buf, pos, s.m);
        get_params(buf, pos, s.v);
        s.step = ck.meta.opt_step;
        ck.opt = std::move(s);
    }
    if (pos != buf.size())
        throw std::runtime_error("checkpoint: trailing bytes in " + path.string());
    return ck;
}

} // namespace rfseeker
