// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors

#pragma once

#include "rfseeker/rng.hpp"

#include <cstdint>
#include <deque>
#include <stdexcept>
#include <vector>

namespace rfseeker {

// One flat transition batch, obs packed row-major [B][obs_dim].
struct TransitionBatch {
    int batch = 0;
    int obs_dim = 0;
    std::vector<float> obs;
    std::vector<float> next_obs;
    std::vector<int> actions;
    std::vector<float> rewards;
    std::vector<uint8_t> dones;
};

// Sequence batch in step-major layout ready for BPTT. obs holds seq_len + 1
// steps so TD targets can read the shifted window without a second lookup.
struct SequenceBatch {
    int batch = 0;
    int seq_len = 0;
    int obs_dim = 0;
    std::vector<float> obs;      // [(seq_len+1)][B][obs_dim]
    std::vector<int> actions;    // [seq_len][B]
    std::vector<float> rewards;  // [seq_len][B]
    std::vector<uint8_t> dones;  // [seq_len][B]
};

// Episode-segmented experience store. Observations are written once per step
// (plus the terminal one), so a transition is a pair of adjacent rows and a
// training sequence is a contiguous window that never crosses an episode
// boundary. Eviction drops whole closed episodes, oldest first.
class ReplayBuffer {
  public:
    ReplayBuffer(int64_t capacity, int obs_dim, int seq_len)
        : capacity_(capacity), obs_dim_(obs_dim), seq_len_(seq_len) {
        if (capacity < 1 || obs_dim < 1 || seq_len < 1)
            throw std::invalid_argument("ReplayBuffer: bad shape");
    }

    void begin_episode(const std::vector<float> &obs0) {
        check_obs(obs0);
        if (!episodes_.empty() && !episodes_.back().closed)
            throw std::logic_error("ReplayBuffer: previous episode still open");
        Episode e;
        e.trans_base = next_trans_;
        e.start_base = next_start_;
        e.obs = obs0;
        episodes_.push_back(std::move(e));
    }

    void push(const std::vector<float> &next_obs, int action, float reward, bool done) {
        check_obs(next_obs);
        if (episodes_.empty() || episodes_.back().closed)
            throw std::logic_error("ReplayBuffer: no open episode");
        Episode &e = episodes_.back();
        e.obs.insert(e.obs.end(), next_obs.begin(), next_obs.end());
        e.actions.push_back(static_cast<uint8_t>(action));
        e.rewards.push_back(reward);
        e.closed = done;
        ++next_trans_;
        ++size_;
        if (e.len() >= seq_len_)
            ++next_start_; // one more valid window ending at this step
        while (size_ > capacity_ && episodes_.front().closed) {
            size_ -= episodes_.front().len();
            episodes_.pop_front();
        }
        if (size_ > capacity_)
            throw std::logic_error("ReplayBuffer: capacity below one episode");
    }

    int64_t size() const { return size_; }
    int64_t n_sequences() const {
        return episodes_.empty() ? 0 : next_start_ - episodes_.front().start_base;
    }
    int obs_dim() const { return obs_dim_; }

    TransitionBatch sample_transitions(int batch, Rng &rng) const {
        if (size_ < batch || batch < 1)
            throw std::invalid_argument("ReplayBuffer: not enough transitions");
        TransitionBatch out;
        out.batch = batch;
        out.obs_dim = obs_dim_;
        out.obs.resize(static_cast<size_t>(batch) * obs_dim_);
        out.next_obs.resize(static_cast<size_t>(batch) * obs_dim_);
        out.actions.resize(batch);
        out.rewards.resize(batch);
        out.dones.resize(batch);
        const int64_t lo = episodes_.front().trans_base;
        for (int b = 0; b < batch; ++b) {
            const int64_t id = lo + static_cast<int64_t>(rng.uniform_int(
                                        static_cast<uint64_t>(next_trans_ - lo)));
            const Episode &e = find_by_trans(id);
            const int t = static_cast<int>(id - e.trans_base);
            const float *row = e.obs.data() + static_cast<size_t>(t) * obs_dim_;
            std::copy(row, row + obs_dim_, out.obs.begin() + static_cast<size_t>(b) * obs_dim_);
            std::copy(row + obs_dim_, row + 2 * obs_dim_,
                      out.next_obs.begin() + static_cast<size_t>(b) * obs_dim_);
            out.actions[b] = e.actions[t];
            out.rewards[b] = e.rewards[t];
            out.dones[b] = (e.closed && t == e.len() - 1) ? 1 : 0;
        }
        return out;
    }

    SequenceBatch sample_sequences(int batch, Rng &rng) const {
        if (n_sequences() < batch || batch < 1)
            throw std::invalid_argument("ReplayBuffer: not enough sequences");
        SequenceBatch out;
        out.batch = batch;
        out.seq_len = seq_len_;
        out.obs_dim = obs_dim_;
        out.obs.resize(static_cast<size_t>(seq_len_ + 1) * batch * obs_dim_);
        out.actions.resize(static_cast<size_t>(seq_len_) * batch);
        out.rewards.resize(static_cast<size_t>(seq_len_) * batch);
        out.dones.resize(static_cast<size_t>(seq_len_) * batch);
        const int64_t lo = episodes_.front().start_base;
        for (int b = 0; b < batch; ++b) {
            const int64_t id = lo + static_cast<int64_t>(rng.uniform_int(
                                        static_cast<uint64_t>(next_start_ - lo)));
            const Episode &e = find_by_start(id);
            const int t0 = static_cast<int>(id - e.start_base);
            for (int k = 0; k <= seq_len_; ++k) {
                const float *row = e.obs.data() + static_cast<size_t>(t0 + k) * obs_dim_;
                std::copy(row, row + obs_dim_,
                          out.obs.begin() +
                              (static_cast<size_t>(k) * batch + b) * obs_dim_);
            }
            for (int k = 0; k < seq_len_; ++k) {
                const int t = t0 + k;
                out.actions[static_cast<size_t>(k) * batch + b] = e.actions[t];
                out.rewards[static_cast<size_t>(k) * batch + b] = e.rewards[t];
                out.dones[static_cast<size_t>(k) * batch + b] =
                    (e.closed && t == e.len() - 1) ? 1 : 0;
            }
        }
        return out;
    }

  private:
    struct Episode {
        std::vector<float> obs; // [(len+1) * obs_dim] once at least one push landed
        std::vector<uint8_t> actions;
        std::vector<float> rewards;
        bool closed = false;
        int64_t trans_base = 0;
        int64_t start_base = 0;
        int len() const { return static_cast<int>(actions.size()); }
    };

    void check_obs(const std::vector<float> &o) const {
        if (static_cast<int>(o.size()) != obs_dim_)
            throw std::invalid_argument("ReplayBuffer: obs size mismatch");
    }

    const Episode &find_by_trans(int64_t id) const {
        size_t lo = 0, hi = episodes_.size();
        while (hi - lo > 1) {
            size_t mid = (lo + hi) / 2;
            if (episodes_[mid].trans_base <= id)
                lo = mid;
            else
                hi = mid;
        }
        return episodes_[lo];
    }

    const Episode &find_by_start(int64_t id) const {
        size_t lo = 0, hi = episodes_.size();
        while (hi - lo > 1) {
            size_t mid = (lo + hi) / 2;
            if (episodes_[mid].start_base <= id)
                lo = mid;
            else
                hi = mid;
        }
        return episodes_[lo];
    }

    int64_t capacity_;
    int obs_dim_;
    int seq_len_;
    std::deque<Episode> episodes_;
    int64_t size_ = 0;       // live transitions
    int64_t next_trans_ = 0; // global transition counter
    int64_t next_start_ = 0; // global sequence-start counter
};

} // namespace rfseeker
