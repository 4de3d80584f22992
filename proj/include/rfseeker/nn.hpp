// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors

#pragma once

#include "rfseeker/common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rfseeker {

// Named parameter arrays grouped into blocks (encoder, lstm, actor_head,
// critic_head). Plain value types: copying a ParamsT deep-copies all storage,
// which is exactly what target networks and meta-adapted copies need.

template <typename T> struct Tensor {
    std::string name;
    std::vector<int> shape; // weights are [in][out], biases [n]
    std::vector<T> data;

    size_t size() const { return data.size(); }
};

template <typename T> struct Block {
    std::string name;
    std::vector<Tensor<T>> tensors;
};

enum class Arch { ff_stats, ff_raw, recurrent_raw };

inline const char *arch_name(Arch a) {
    switch (a) {
    case Arch::ff_stats: return "ff_stats";
    case Arch::ff_raw: return "ff_raw";
    case Arch::recurrent_raw: return "recurrent_raw";
    }
    throw std::invalid_argument("unknown architecture enum value");
}

inline Arch arch_from_name(const std::string &name) {
    if (name == "ff_stats")
        return Arch::ff_stats;
    if (name == "ff_raw")
        return Arch::ff_raw;
    if (name == "recurrent_raw")
        return Arch::recurrent_raw;
    throw std::invalid_argument("unknown architecture: " + name);
}

template <typename T> struct ParamsT {
    Arch arch = Arch::ff_stats;
    int obs_dim = 0;
    int n_actions = 0;
    std::vector<Block<T>> blocks;

    Tensor<T> &tensor(size_t block, size_t idx, const char *want_name) {
        return const_cast<Tensor<T> &>(std::as_const(*this).tensor(block, idx, want_name));
    }
    const Tensor<T> &tensor(size_t block, size_t idx, const char *want_name) const {
        if (block >= blocks.size() || idx >= blocks[block].tensors.size())
            throw std::invalid_argument("params: no tensor at requested slot");
        const Tensor<T> &t = blocks[block].tensors[idx];
        if (t.name != want_name)
            throw std::invalid_argument("params: tensor slot holds '" + t.name + "', wanted '" +
                                        want_name + "'");
        return t;
    }

    Block<T> *find_block(const std::string &name) {
        for (auto &b : blocks)
            if (b.name == name)
                return &b;
        return nullptr;
    }
    const Block<T> *find_block(const std::string &name) const {
        return const_cast<ParamsT *>(this)->find_block(name);
    }
};

using Params = ParamsT<float>;

template <typename T> size_t param_count(const ParamsT<T> &p) {
    size_t n = 0;
    for (const auto &b : p.blocks)
        for (const auto &t : b.tensors)
            n += t.size();
    return n;
}

template <typename T> void fill_zero(ParamsT<T> &p) {
    for (auto &b : p.blocks)
        for (auto &t : b.tensors)
            std::fill(t.data.begin(), t.data.end(), T(0));
}

template <typename T> ParamsT<T> zeros_like(const ParamsT<T> &p) {
    ParamsT<T> z = p;
    fill_zero(z);
    return z;
}

template <typename T> bool params_finite(const ParamsT<T> &p) {
    for (const auto &b : p.blocks)
        for (const auto &t : b.tensors)
            for (T v : t.data)
                if (!std::isfinite(static_cast<double>(v)))
                    return false;
    return true;
}

template <typename T> bool same_shape(const ParamsT<T> &a, const ParamsT<T> &b) {
    if (a.blocks.size() != b.blocks.size())
        return false;
    for (size_t i = 0; i < a.blocks.size(); ++i) {
        if (a.blocks[i].name != b.blocks[i].name ||
            a.blocks[i].tensors.size() != b.blocks[i].tensors.size())
            return false;
        for (size_t j = 0; j < a.blocks[i].tensors.size(); ++j)
            if (a.blocks[i].tensors[j].name != b.blocks[i].tensors[j].name ||
                a.blocks[i].tensors[j].shape != b.blocks[i].tensors[j].shape)
                return false;
    }
    return true;
}

// dst += scale * src, matching tensors pairwise
template <typename T> void add_scaled(ParamsT<T> &dst, const ParamsT<T> &src, T scale) {
    if (!same_shape(dst, src))
        throw std::invalid_argument("params: shape mismatch in add_scaled");
    for (size_t i = 0; i < dst.blocks.size(); ++i)
        for (size_t j = 0; j < dst.blocks[i].tensors.size(); ++j) {
            auto &d = dst.blocks[i].tensors[j].data;
            const auto &s = src.blocks[i].tensors[j].data;
            for (size_t k = 0; k < d.size(); ++k)
                d[k] += scale * s[k];
        }
}

template <typename T> double global_norm(const ParamsT<T> &p) {
    double ss = 0.0;
    for (const auto &b : p.blocks)
        for (const auto &t : b.tensors)
            for (T v : t.data)
                ss += static_cast<double>(v) * static_cast<double>(v);
    return std::sqrt(ss);
}

// scales all tensors so the global norm is at most max_norm; returns the
// pre-clip norm
template <typename T> double clip_global_norm(ParamsT<T> &p, double max_norm) {
    double norm = global_norm(p);
    if (norm > max_norm && norm > 0.0) {
        T s = static_cast<T>(max_norm / norm);
        for (auto &b : p.blocks)
            for (auto &t : b.tensors)
                for (T &v : t.data)
                    v *= s;
    }
    return norm;
}

template <typename U, typename T> ParamsT<U> cast_params(const ParamsT<T> &p) {
    ParamsT<U> out;
    out.arch = p.arch;
    out.obs_dim = p.obs_dim;
    out.n_actions = p.n_actions;
    out.blocks.reserve(p.blocks.size());
    for (const auto &b : p.blocks) {
        Block<U> nb;
        nb.name = b.name;
        nb.tensors.reserve(b.tensors.size());
        for (const auto &t : b.tensors) {
            Tensor<U> nt;
            nt.name = t.name;
            nt.shape = t.shape;
            nt.data.assign(t.data.begin(), t.data.end());
            nb.tensors.push_back(std::move(nt));
        }
        out.blocks.push_back(std::move(nb));
    }
    return out;
}

} // namespace rfseeker
