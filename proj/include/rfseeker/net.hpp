// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors

#pragma once

#include "rfseeker/kernels.hpp"
#include "rfseeker/nn.hpp"
#include "rfseeker/rng.hpp"

namespace rfseeker {

// Fixed layer sizes shared by the raw-IQ architectures. Three stride-4
// convolutions take 1024 samples down to 14 positions; the flattened 896
// values feed a dense layer into the latent.
namespace netdim {
inline constexpr int kRawChannels = 8;
inline constexpr int kRawSamples = 1024;
inline constexpr int kKernel = 8;
inline constexpr int kStride = 4;
inline constexpr int kC1 = 16, kC2 = 32, kC3 = 64;
inline constexpr int kL0 = 1024, kL1 = 255, kL2 = 62, kL3 = 14;
inline constexpr int kFlat = kL3 * kC3; // 896
inline constexpr int kFFLatent = 256;
inline constexpr int kLstmIn = 128;
inline constexpr int kLstmHidden = 512;
} // namespace netdim

using kernels::conv1d_backward_data;
using kernels::conv1d_backward_param;
using kernels::conv1d_forward;
using kernels::dense_backward_data;
using kernels::dense_backward_param;
using kernels::dense_forward;

// Batched LSTM state. Rows are independent; zero rows mean a fresh episode.
template <typename T> struct Memory {
    int batch = 0;
    std::vector<T> h, c; // each [batch][kLstmHidden]
};

template <typename T> Memory<T> zero_memory(int batch) {
    Memory<T> m;
    m.batch = batch;
    m.h.assign(static_cast<size_t>(batch) * netdim::kLstmHidden, T(0));
    m.c.assign(static_cast<size_t>(batch) * netdim::kLstmHidden, T(0));
    return m;
}

template <typename T> void reset_memory_row(Memory<T> &m, int row) {
    std::fill_n(m.h.begin() + static_cast<size_t>(row) * netdim::kLstmHidden, netdim::kLstmHidden,
                T(0));
    std::fill_n(m.c.begin() + static_cast<size_t>(row) * netdim::kLstmHidden, netdim::kLstmHidden,
                T(0));
}

template <typename T> struct EncCache {
    int B = 0;
    std::vector<T> x;                  // network-entry activations
    std::vector<T> z1, a1, z2, a2, z3, a3; // conv (raw) or first dense (stats) pre/post
    std::vector<T> zf, latent;         // final dense pre-activation and output
};

template <typename T> struct LstmStepCache {
    std::vector<T> x;          // [B][in]
    std::vector<T> h_in, c_in; // state entering the step, after any episode reset
    std::vector<T> gates;      // [B][4H], post-nonlinearity, packed [i, f, g, o]
    std::vector<T> c_out, tanh_c, h_out;
};

template <typename T> struct FwdCache {
    EncCache<T> enc;
};

template <typename T> struct SeqCache {
    int steps = 0;
    int B = 0;
    std::vector<EncCache<T>> enc;
    std::vector<LstmStepCache<T>> lstm;
    std::vector<T> carry; // [steps][B]; 0 cuts the recurrence at that step
};

template <typename T> struct NetOut {
    std::vector<T> logits; // [rows][n_actions]
    std::vector<T> value;  // [rows]
};

template <typename T> inline T sigmoid(T x) { return T(1) / (T(1) + std::exp(-x)); }

// One LSTM step over a batch, gates packed [i, f, g, o]. mem is advanced in
// place; when cache is given, everything backward needs is captured first.
template <typename T>
void lstm_step(const T *wx, const T *wh, const T *bias, const T *x, int B, int in_dim, int hidden,
               Memory<T> &mem, LstmStepCache<T> *cache = nullptr) {
    const int H4 = 4 * hidden;
    std::vector<T> z(static_cast<size_t>(B) * H4);
    dense_forward(x, wx, bias, z.data(), B, in_dim, H4);
    dense_forward(mem.h.data(), wh, static_cast<const T *>(nullptr), z.data(), B, hidden, H4,
                  true);
    if (cache) {
        cache->x.assign(x, x + static_cast<size_t>(B) * in_dim);
        cache->h_in = mem.h;
        cache->c_in = mem.c;
        cache->tanh_c.resize(static_cast<size_t>(B) * hidden);
    }
    for (int b = 0; b < B; ++b) {
        T *zr = z.data() + static_cast<size_t>(b) * H4;
        T *hr = mem.h.data() + static_cast<size_t>(b) * hidden;
        T *cr = mem.c.data() + static_cast<size_t>(b) * hidden;
        for (int j = 0; j < hidden; ++j) {
            T gi = sigmoid(zr[j]);
            T gf = sigmoid(zr[hidden + j]);
            T gg = std::tanh(zr[2 * hidden + j]);
            T go = sigmoid(zr[3 * hidden + j]);
            T c_new = gf * cr[j] + gi * gg;
            T tc = std::tanh(c_new);
            zr[j] = gi;
            zr[hidden + j] = gf;
            zr[2 * hidden + j] = gg;
            zr[3 * hidden + j] = go;
            cr[j] = c_new;
            hr[j] = go * tc;
            if (cache)
                cache->tanh_c[static_cast<size_t>(b) * hidden + j] = tc;
        }
    }
    if (cache) {
        cache->gates = std::move(z);
        cache->c_out = mem.c;
        cache->h_out = mem.h;
    }
}

// Reverse of lstm_step. dx and dh_in/dc_in are overwritten; dwx/dwh/db are
// accumulated. dc_out may be null when no gradient flows into the cell state.
template <typename T>
void lstm_step_backward(const T *wx, const T *wh, const LstmStepCache<T> &cc, int B, int in_dim,
                        int hidden, const T *dh_out, const T *dc_out, T *dx, T *dh_in, T *dc_in,
                        T *dwx, T *dwh, T *db) {
    const int H4 = 4 * hidden;
    std::vector<T> dz(static_cast<size_t>(B) * H4);
    for (int b = 0; b < B; ++b) {
        const T *g = cc.gates.data() + static_cast<size_t>(b) * H4;
        const T *cin = cc.c_in.data() + static_cast<size_t>(b) * hidden;
        const T *tc = cc.tanh_c.data() + static_cast<size_t>(b) * hidden;
        const T *dho = dh_out + static_cast<size_t>(b) * hidden;
        T *dzr = dz.data() + static_cast<size_t>(b) * H4;
        T *dcr = dc_in + static_cast<size_t>(b) * hidden;
        for (int j = 0; j < hidden; ++j) {
            T gi = g[j], gf = g[hidden + j], gg = g[2 * hidden + j], go = g[3 * hidden + j];
            T dout = dho[j] * tc[j];
            T dc = dho[j] * go * (T(1) - tc[j] * tc[j]);
            if (dc_out)
                dc += dc_out[static_cast<size_t>(b) * hidden + j];
            dzr[j] = dc * gg * gi * (T(1) - gi);
            dzr[hidden + j] = dc * cin[j] * gf * (T(1) - gf);
            dzr[2 * hidden + j] = dc * gi * (T(1) - gg * gg);
            dzr[3 * hidden + j] = dout * go * (T(1) - go);
            dcr[j] = dc * gf;
        }
    }
    dense_backward_data(dz.data(), wx, dx, B, in_dim, H4);
    dense_backward_data(dz.data(), wh, dh_in, B, hidden, H4);
    dense_backward_param(cc.x.data(), dz.data(), dwx, db, B, in_dim, H4);
    dense_backward_param(cc.h_in.data(), dz.data(), dwh, static_cast<T *>(nullptr), B, hidden, H4);
}

// columns-orthonormal (rows ≥ cols) or rows-orthonormal (rows < cols) matrix
// scaled by gain, drawn from a Gaussian and orthogonalized in double
std::vector<double> orthogonal_matrix(int rows, int cols, double gain, Rng &rng);

// Shared actor-critic network for the three fixed architectures. Forward and
// backward walk an explicit per-architecture graph; all heavy lifting is in
// the dense/conv kernels, so float and double instantiations share code.
template <typename T> class PolicyNet {
  public:
    PolicyNet(Arch arch, int obs_dim, int n_actions = 6) {
        arch_ = arch;
        obs_dim_ = obs_dim;
        n_actions_ = n_actions;
        if (n_actions_ < 2)
            throw std::invalid_argument("net: need at least 2 actions");
        if (raw_input() && obs_dim_ != netdim::kRawChannels * netdim::kRawSamples)
            throw std::invalid_argument("net: raw architectures take 8x1024 observations");
        if (!raw_input() && obs_dim_ < 1)
            throw std::invalid_argument("net: empty observation");
    }

    Arch arch() const { return arch_; }
    bool recurrent() const { return arch_ == Arch::recurrent_raw; }
    bool raw_input() const { return arch_ != Arch::ff_stats; }
    int obs_dim() const { return obs_dim_; }
    int n_actions() const { return n_actions_; }
    // width of the vector feeding the actor/critic heads
    int feat_dim() const { return recurrent() ? netdim::kLstmHidden : netdim::kFFLatent; }
    // width of the encoder output (LSTM input for the recurrent arch)
    int enc_dim() const { return recurrent() ? netdim::kLstmIn : netdim::kFFLatent; }

    ParamsT<T> init_params(Rng &rng) const;

    // single batch step; recurrent arch advances mem in place
    NetOut<T> forward(const ParamsT<T> &p, const T *obs, int B, Memory<T> *mem = nullptr) const {
        check_params(p);
        NetOut<T> out;
        out.logits.resize(static_cast<size_t>(B) * n_actions_);
        out.value.resize(static_cast<size_t>(B));
        EncCache<T> ec;
        encode(p, obs, B, ec);
        if (recurrent()) {
            if (!mem || mem->batch != B)
                throw std::invalid_argument("net: recurrent forward needs matching memory");
            const Block<T> &l = p.blocks[1];
            lstm_step(l.tensors[0].data.data(), l.tensors[1].data.data(),
                      l.tensors[2].data.data(), ec.latent.data(), B, netdim::kLstmIn,
                      netdim::kLstmHidden, *mem);
            heads_forward(p, mem->h.data(), B, out.logits.data(), out.value.data());
        } else {
            if (mem)
                throw std::invalid_argument("net: feedforward arch takes no memory");
            heads_forward(p, ec.latent.data(), B, out.logits.data(), out.value.data());
        }
        return out;
    }

    // feedforward training pass with activation capture
    NetOut<T> forward_train(const ParamsT<T> &p, const T *obs, int B, FwdCache<T> &cache) const {
        if (recurrent())
            throw std::invalid_argument("net: use seq_forward_train for the recurrent arch");
        check_params(p);
        NetOut<T> out;
        out.logits.resize(static_cast<size_t>(B) * n_actions_);
        out.value.resize(static_cast<size_t>(B));
        encode(p, obs, B, cache.enc);
        heads_forward(p, cache.enc.latent.data(), B, out.logits.data(), out.value.data());
        return out;
    }

    // accumulates into grads (zero it first); dlogits or dvalue may be null
    void backward_train(const ParamsT<T> &p, const FwdCache<T> &cache, const T *dlogits,
                        const T *dvalue, ParamsT<T> &grads) const {
        if (recurrent())
            throw std::invalid_argument("net: use seq_backward_train for the recurrent arch");
        int B = cache.enc.B;
        std::vector<T> dfeat(static_cast<size_t>(B) * feat_dim());
        heads_backward(p, cache.enc.latent.data(), B, dlogits, dvalue, grads, dfeat.data());
        enc_backward(p, cache.enc, B, dfeat.data(), grads);
    }

    // BPTT pass over obs laid out [steps][B][obs_dim]. carry is [steps][B]
    // with 0 wherever an episode begins at that step (1 carries state over);
    // null means carry everywhere. mem0 supplies the pre-sequence state.
    NetOut<T> seq_forward_train(const ParamsT<T> &p, const T *obs, int steps, int B,
                                const Memory<T> &mem0, const T *carry, SeqCache<T> &cache) const {
        if (!recurrent())
            throw std::invalid_argument("net: seq_forward_train is recurrent-only");
        if (mem0.batch != B)
            throw std::invalid_argument("net: memory batch mismatch");
        check_params(p);
        cache.steps = steps;
        cache.B = B;
        cache.enc.assign(static_cast<size_t>(steps), EncCache<T>{});
        cache.lstm.assign(static_cast<size_t>(steps), LstmStepCache<T>{});
        if (carry)
            cache.carry.assign(carry, carry + static_cast<size_t>(steps) * B);
        else
            cache.carry.assign(static_cast<size_t>(steps) * B, T(1));

        NetOut<T> out;
        out.logits.resize(static_cast<size_t>(steps) * B * n_actions_);
        out.value.resize(static_cast<size_t>(steps) * B);
        Memory<T> mem = mem0;
        const Block<T> &l = p.blocks[1];
        for (int t = 0; t < steps; ++t) {
            encode(p, obs + static_cast<size_t>(t) * B * obs_dim_, B, cache.enc[t]);
            for (int b = 0; b < B; ++b) {
                T m = cache.carry[static_cast<size_t>(t) * B + b];
                if (m != T(1)) {
                    for (int j = 0; j < netdim::kLstmHidden; ++j) {
                        mem.h[static_cast<size_t>(b) * netdim::kLstmHidden + j] *= m;
                        mem.c[static_cast<size_t>(b) * netdim::kLstmHidden + j] *= m;
                    }
                }
            }
            lstm_step(l.tensors[0].data.data(), l.tensors[1].data.data(),
                      l.tensors[2].data.data(), cache.enc[t].latent.data(), B, netdim::kLstmIn,
                      netdim::kLstmHidden, mem, &cache.lstm[t]);
            heads_forward(p, mem.h.data(), B,
                          out.logits.data() + static_cast<size_t>(t) * B * n_actions_,
                          out.value.data() + static_cast<size_t>(t) * B);
        }
        return out;
    }

    void seq_backward_train(const ParamsT<T> &p, const SeqCache<T> &cache, const T *dlogits,
                            const T *dvalue, ParamsT<T> &grads) const {
        if (!recurrent())
            throw std::invalid_argument("net: seq_backward_train is recurrent-only");
        const int H = netdim::kLstmHidden;
        const int steps = cache.steps, B = cache.B;
        const Block<T> &l = p.blocks[1];
        Tensor<T> &gwx = grads.tensor(1, 0, "wx");
        Tensor<T> &gwh = grads.tensor(1, 1, "wh");
        Tensor<T> &gb = grads.tensor(1, 2, "b");

        std::vector<T> dfeat(static_cast<size_t>(B) * H);
        std::vector<T> dh_next(static_cast<size_t>(B) * H, T(0));
        std::vector<T> dc_next(static_cast<size_t>(B) * H, T(0));
        std::vector<T> dh_in(static_cast<size_t>(B) * H);
        std::vector<T> dc_in(static_cast<size_t>(B) * H);
        std::vector<T> dx(static_cast<size_t>(B) * netdim::kLstmIn);
        bool have_future = false;
        for (int t = steps - 1; t >= 0; --t) {
            heads_backward(p, cache.lstm[t].h_out.data(), B,
                           dlogits ? dlogits + static_cast<size_t>(t) * B * n_actions_ : nullptr,
                           dvalue ? dvalue + static_cast<size_t>(t) * B : nullptr, grads,
                           dfeat.data());
            if (have_future)
                for (size_t i = 0; i < dfeat.size(); ++i)
                    dfeat[i] += dh_next[i];
            lstm_step_backward(l.tensors[0].data.data(), l.tensors[1].data.data(), cache.lstm[t],
                               B, netdim::kLstmIn, H, dfeat.data(),
                               have_future ? dc_next.data() : nullptr, dx.data(), dh_in.data(),
                               dc_in.data(), gwx.data.data(), gwh.data.data(), gb.data.data());
            for (int b = 0; b < B; ++b) {
                T m = cache.carry[static_cast<size_t>(t) * B + b];
                for (int j = 0; j < H; ++j) {
                    dh_next[static_cast<size_t>(b) * H + j] =
                        m * dh_in[static_cast<size_t>(b) * H + j];
                    dc_next[static_cast<size_t>(b) * H + j] =
                        m * dc_in[static_cast<size_t>(b) * H + j];
                }
            }
            have_future = true;
            enc_backward(p, cache.enc[t], B, dx.data(), grads);
        }
    }

  private:
    bool stats_arch() const { return arch_ == Arch::ff_stats; }
    int actor_block() const { return recurrent() ? 2 : 1; }
    int critic_block() const { return recurrent() ? 3 : 2; }

    void check_params(const ParamsT<T> &p) const {
        if (p.arch != arch_ || p.obs_dim != obs_dim_ || p.n_actions != n_actions_)
            throw std::invalid_argument("net: params built for a different network");
    }

    // fills cache with network-entry activations and all layer outputs
    void encode(const ParamsT<T> &p, const T *obs, int B, EncCache<T> &ec) const {
        using namespace netdim;
        ec.B = B;
        const Block<T> &e = p.blocks[0];
        if (stats_arch()) {
            ec.x.assign(obs, obs + static_cast<size_t>(B) * obs_dim_);
            const Tensor<T> &w1 = e.tensors[0], &b1 = e.tensors[1];
            const Tensor<T> &w2 = e.tensors[2], &b2 = e.tensors[3];
            ec.z1.resize(static_cast<size_t>(B) * kFFLatent);
            dense_forward(ec.x.data(), w1.data.data(), b1.data.data(), ec.z1.data(), B, obs_dim_,
                          kFFLatent);
            relu(ec.z1, ec.a1);
            ec.zf.resize(static_cast<size_t>(B) * kFFLatent);
            dense_forward(ec.a1.data(), w2.data.data(), b2.data.data(), ec.zf.data(), B, kFFLatent,
                          kFFLatent);
            relu(ec.zf, ec.latent);
            return;
        }
        // raw path: transpose each row from [8][1024] to channel-last [1024][8]
        ec.x.resize(static_cast<size_t>(B) * kRawSamples * kRawChannels);
        for (int b = 0; b < B; ++b) {
            const T *src = obs + static_cast<size_t>(b) * obs_dim_;
            T *dst = ec.x.data() + static_cast<size_t>(b) * kRawSamples * kRawChannels;
            for (int ch = 0; ch < kRawChannels; ++ch)
                for (int n = 0; n < kRawSamples; ++n)
                    dst[static_cast<size_t>(n) * kRawChannels + ch] =
                        src[static_cast<size_t>(ch) * kRawSamples + n];
        }
        ec.z1.resize(static_cast<size_t>(B) * kL1 * kC1);
        conv1d_forward(ec.x.data(), e.tensors[0].data.data(), e.tensors[1].data.data(),
                       ec.z1.data(), B, kL0, kRawChannels, kC1, kKernel, kStride);
        relu(ec.z1, ec.a1);
        ec.z2.resize(static_cast<size_t>(B) * kL2 * kC2);
        conv1d_forward(ec.a1.data(), e.tensors[2].data.data(), e.tensors[3].data.data(),
                       ec.z2.data(), B, kL1, kC1, kC2, kKernel, kStride);
        relu(ec.z2, ec.a2);
        ec.z3.resize(static_cast<size_t>(B) * kL3 * kC3);
        conv1d_forward(ec.a2.data(), e.tensors[4].data.data(), e.tensors[5].data.data(),
                       ec.z3.data(), B, kL2, kC2, kC3, kKernel, kStride);
        relu(ec.z3, ec.a3); // [B][14][64] read as the flat [B][896]
        int E = enc_dim();
        ec.zf.resize(static_cast<size_t>(B) * E);
        dense_forward(ec.a3.data(), e.tensors[6].data.data(), e.tensors[7].data.data(),
                      ec.zf.data(), B, kFlat, E);
        relu(ec.zf, ec.latent);
    }

    void enc_backward(const ParamsT<T> &p, const EncCache<T> &ec, int B, const T *dlatent,
                      ParamsT<T> &grads) const {
        using namespace netdim;
        const Block<T> &e = p.blocks[0];
        Block<T> &ge = grads.blocks[0];
        int E = enc_dim();
        std::vector<T> dzf(static_cast<size_t>(B) * E);
        relu_backward(ec.zf, dlatent, dzf);
        if (stats_arch()) {
            dense_backward_param(ec.a1.data(), dzf.data(), ge.tensors[2].data.data(),
                                 ge.tensors[3].data.data(), B, kFFLatent, kFFLatent);
            std::vector<T> da1(static_cast<size_t>(B) * kFFLatent);
            dense_backward_data(dzf.data(), e.tensors[2].data.data(), da1.data(), B, kFFLatent,
                                kFFLatent);
            std::vector<T> dz1(static_cast<size_t>(B) * kFFLatent);
            relu_backward(ec.z1, da1.data(), dz1);
            dense_backward_param(ec.x.data(), dz1.data(), ge.tensors[0].data.data(),
                                 ge.tensors[1].data.data(), B, obs_dim_, kFFLatent);
            return;
        }
        dense_backward_param(ec.a3.data(), dzf.data(), ge.tensors[6].data.data(),
                             ge.tensors[7].data.data(), B, kFlat, E);
        std::vector<T> da3(static_cast<size_t>(B) * kFlat);
        dense_backward_data(dzf.data(), e.tensors[6].data.data(), da3.data(), B, kFlat, E);
        std::vector<T> dz3(static_cast<size_t>(B) * kFlat);
        relu_backward(ec.z3, da3.data(), dz3);
        conv1d_backward_param(ec.a2.data(), dz3.data(), ge.tensors[4].data.data(),
                              ge.tensors[5].data.data(), B, kL2, kC2, kC3, kKernel, kStride);
        std::vector<T> da2(static_cast<size_t>(B) * kL2 * kC2, T(0));
        conv1d_backward_data(dz3.data(), e.tensors[4].data.data(), da2.data(), B, kL2, kC2, kC3,
                             kKernel, kStride);
        std::vector<T> dz2(static_cast<size_t>(B) * kL2 * kC2);
        relu_backward(ec.z2, da2.data(), dz2);
        conv1d_backward_param(ec.a1.data(), dz2.data(), ge.tensors[2].data.data(),
                              ge.tensors[3].data.data(), B, kL1, kC1, kC2, kKernel, kStride);
        std::vector<T> da1(static_cast<size_t>(B) * kL1 * kC1, T(0));
        conv1d_backward_data(dz2.data(), e.tensors[2].data.data(), da1.data(), B, kL1, kC1, kC2,
                             kKernel, kStride);
        std::vector<T> dz1(static_cast<size_t>(B) * kL1 * kC1);
        relu_backward(ec.z1, da1.data(), dz1);
        conv1d_backward_param(ec.x.data(), dz1.data(), ge.tensors[0].data.data(),
                              ge.tensors[1].data.data(), B, kL0, kRawChannels, kC1, kKernel,
                              kStride);
    }

    void heads_forward(const ParamsT<T> &p, const T *feat, int B, T *logits, T *value) const {
        const Block<T> &a = p.blocks[actor_block()];
        const Block<T> &c = p.blocks[critic_block()];
        dense_forward(feat, a.tensors[0].data.data(), a.tensors[1].data.data(), logits, B,
                      feat_dim(), n_actions_);
        dense_forward(feat, c.tensors[0].data.data(), c.tensors[1].data.data(), value, B,
                      feat_dim(), 1);
    }

    // dfeat is overwritten with the combined gradient into the shared trunk
    void heads_backward(const ParamsT<T> &p, const T *feat, int B, const T *dlogits,
                        const T *dvalue, ParamsT<T> &grads, T *dfeat) const {
        int F = feat_dim();
        const Block<T> &a = p.blocks[actor_block()];
        const Block<T> &c = p.blocks[critic_block()];
        Block<T> &ga = grads.blocks[actor_block()];
        Block<T> &gc = grads.blocks[critic_block()];
        if (dlogits) {
            dense_backward_data(dlogits, a.tensors[0].data.data(), dfeat, B, F, n_actions_);
            dense_backward_param(feat, dlogits, ga.tensors[0].data.data(),
                                 ga.tensors[1].data.data(), B, F, n_actions_);
        } else {
            std::fill_n(dfeat, static_cast<size_t>(B) * F, T(0));
        }
        if (dvalue) {
            std::vector<T> dv(static_cast<size_t>(B) * F);
            dense_backward_data(dvalue, c.tensors[0].data.data(), dv.data(), B, F, 1);
            for (size_t i = 0; i < dv.size(); ++i)
                dfeat[i] += dv[i];
            dense_backward_param(feat, dvalue, gc.tensors[0].data.data(),
                                 gc.tensors[1].data.data(), B, F, 1);
        }
    }

    static void relu(const std::vector<T> &z, std::vector<T> &a) {
        a.resize(z.size());
        for (size_t i = 0; i < z.size(); ++i)
            a[i] = z[i] > T(0) ? z[i] : T(0);
    }

    static void relu_backward(const std::vector<T> &z, const T *da, std::vector<T> &dz) {
        dz.resize(z.size());
        for (size_t i = 0; i < z.size(); ++i)
            dz[i] = z[i] > T(0) ? da[i] : T(0);
    }

    Arch arch_;
    int obs_dim_;
    int n_actions_;
};

template <typename T> ParamsT<T> PolicyNet<T>::init_params(Rng &rng) const {
    using namespace netdim;
    ParamsT<T> p;
    p.arch = arch_;
    p.obs_dim = obs_dim_;
    p.n_actions = n_actions_;

    auto tensor = [](const char *name, int rows, int cols) {
        Tensor<T> t;
        t.name = name;
        if (cols > 0) {
            t.shape = {rows, cols};
            t.data.assign(static_cast<size_t>(rows) * cols, T(0));
        } else {
            t.shape = {rows};
            t.data.assign(static_cast<size_t>(rows), T(0));
        }
        return t;
    };
    auto ortho = [&rng](Tensor<T> &t, double gain) {
        auto m = orthogonal_matrix(t.shape[0], t.shape[1], gain, rng);
        for (size_t i = 0; i < m.size(); ++i)
            t.data[i] = static_cast<T>(m[i]);
    };
    const double kHiddenGain = std::sqrt(2.0); // ReLU-preserving scale

    Block<T> enc;
    enc.name = "encoder";
    if (stats_arch()) {
        enc.tensors.push_back(tensor("fc1.w", obs_dim_, kFFLatent));
        enc.tensors.push_back(tensor("fc1.b", kFFLatent, 0));
        enc.tensors.push_back(tensor("fc2.w", kFFLatent, kFFLatent));
        enc.tensors.push_back(tensor("fc2.b", kFFLatent, 0));
        ortho(enc.tensors[0], kHiddenGain);
        ortho(enc.tensors[2], kHiddenGain);
    } else {
        enc.tensors.push_back(tensor("conv1.w", kKernel * kRawChannels, kC1));
        enc.tensors.push_back(tensor("conv1.b", kC1, 0));
        enc.tensors.push_back(tensor("conv2.w", kKernel * kC1, kC2));
        enc.tensors.push_back(tensor("conv2.b", kC2, 0));
        enc.tensors.push_back(tensor("conv3.w", kKernel * kC2, kC3));
        enc.tensors.push_back(tensor("conv3.b", kC3, 0));
        enc.tensors.push_back(tensor("fc.w", kFlat, enc_dim()));
        enc.tensors.push_back(tensor("fc.b", enc_dim(), 0));
        ortho(enc.tensors[0], kHiddenGain);
        ortho(enc.tensors[2], kHiddenGain);
        ortho(enc.tensors[4], kHiddenGain);
        ortho(enc.tensors[6], kHiddenGain);
    }
    p.blocks.push_back(std::move(enc));

    if (recurrent()) {
        Block<T> lstm;
        lstm.name = "lstm";
        lstm.tensors.push_back(tensor("wx", kLstmIn, 4 * kLstmHidden));
        lstm.tensors.push_back(tensor("wh", kLstmHidden, 4 * kLstmHidden));
        lstm.tensors.push_back(tensor("b", 4 * kLstmHidden, 0));
        // orthogonal per gate so each of i/f/g/o starts well conditioned
        for (int gate = 0; gate < 4; ++gate) {
            auto mx = orthogonal_matrix(kLstmIn, kLstmHidden, 1.0, rng);
            auto mh = orthogonal_matrix(kLstmHidden, kLstmHidden, 1.0, rng);
            for (int r = 0; r < kLstmIn; ++r)
                for (int col = 0; col < kLstmHidden; ++col)
                    lstm.tensors[0].data[static_cast<size_t>(r) * 4 * kLstmHidden +
                                         gate * kLstmHidden + col] =
                        static_cast<T>(mx[static_cast<size_t>(r) * kLstmHidden + col]);
            for (int r = 0; r < kLstmHidden; ++r)
                for (int col = 0; col < kLstmHidden; ++col)
                    lstm.tensors[1].data[static_cast<size_t>(r) * 4 * kLstmHidden +
                                         gate * kLstmHidden + col] =
                        static_cast<T>(mh[static_cast<size_t>(r) * kLstmHidden + col]);
        }
        p.blocks.push_back(std::move(lstm));
    }

    Block<T> actor;
    actor.name = "actor_head";
    actor.tensors.push_back(tensor("w", feat_dim(), n_actions_));
    actor.tensors.push_back(tensor("b", n_actions_, 0));
    ortho(actor.tensors[0], 0.01); // small head keeps the initial policy near uniform
    p.blocks.push_back(std::move(actor));

    Block<T> critic;
    critic.name = "critic_head";
    critic.tensors.push_back(tensor("w", feat_dim(), 1));
    critic.tensors.push_back(tensor("b", 1, 0));
    ortho(critic.tensors[0], 1.0);
    p.blocks.push_back(std::move(critic));
    return p;
}

// spec-shaped convenience wrapper around PolicyNet + init
inline Params build_network(Arch arch, int obs_dim, int n_actions, Rng &rng) {
    return PolicyNet<float>(arch, obs_dim, n_actions).init_params(rng);
}

} // namespace rfseeker
