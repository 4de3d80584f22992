// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 rfseeker contributors

#include "rfseeker/features.hpp"

#include "rfseeker/io.hpp"
#include "rfseeker/version.hpp"

#include <cmath>

namespace rfseeker {

using json = nlohmann::json;

const char *feature_kind_name(FeatureKind kind) {
    switch (kind) {
    case FeatureKind::mean:
        return "mean";
    case FeatureKind::std_dev:
        return "std";
    case FeatureKind::rms:
        return "rms";
    case FeatureKind::phase_diff:
        return "phase_diff";
    case FeatureKind::raw_iq:
        return "raw_iq";
    }
    throw std::invalid_argument("unknown feature kind");
}

FeatureKind feature_kind_from_name(const std::string &name) {
    for (FeatureKind k : {FeatureKind::mean, FeatureKind::std_dev, FeatureKind::rms,
                          FeatureKind::phase_diff, FeatureKind::raw_iq})
        if (name == feature_kind_name(k))
            return k;
    throw std::invalid_argument("unknown feature kind: " + name);
}

int feature_dim(FeatureKind kind) {
    switch (kind) {
    case FeatureKind::mean:
    case FeatureKind::std_dev:
        return 2;
    case FeatureKind::rms:
        return 1;
    case FeatureKind::phase_diff:
        return 3;
    case FeatureKind::raw_iq:
        break;
    }
    throw std::invalid_argument("feature_dim: raw_iq has no feature width");
}

namespace {
constexpr int kA = IQObservation::kAntennas;
constexpr int kN = IQObservation::kSamples;
} // namespace

FeatureVector feat_mean(const IQObservation &obs) {
    FeatureVector f{FeatureKind::mean, std::vector<double>(kA * 2)};
    for (int a = 0; a < kA; ++a) {
        double si = 0.0, sq = 0.0;
        for (int n = 0; n < kN; ++n) {
            si += obs.at(a, n).real();
            sq += obs.at(a, n).imag();
        }
        f.values[a * 2 + 0] = si / kN;
        f.values[a * 2 + 1] = sq / kN;
    }
    return f;
}

FeatureVector feat_std(const IQObservation &obs) {
    FeatureVector mean = feat_mean(obs);
    FeatureVector f{FeatureKind::std_dev, std::vector<double>(kA * 2)};
    for (int a = 0; a < kA; ++a) {
        double vi = 0.0, vq = 0.0;
        for (int n = 0; n < kN; ++n) {
            vi += sqr(obs.at(a, n).real() - mean.values[a * 2 + 0]);
            vq += sqr(obs.at(a, n).imag() - mean.values[a * 2 + 1]);
        }
        f.values[a * 2 + 0] = std::sqrt(vi / kN);
        f.values[a * 2 + 1] = std::sqrt(vq / kN);
    }
    return f;
}

FeatureVector feat_rms(const IQObservation &obs) {
    FeatureVector f{FeatureKind::rms, std::vector<double>(kA)};
    for (int a = 0; a < kA; ++a) {
        double p = 0.0;
        for (int n = 0; n < kN; ++n)
            p += std::norm(obs.at(a, n));
        f.values[a] = std::sqrt(p / kN);
    }
    return f;
}

FeatureVector feat_phase_diff(const IQObservation &obs) {
    for (int a = 0; a < kA; ++a) {
        bool all_zero = true;
        for (int n = 0; n < kN && all_zero; ++n)
            if (obs.at(a, n) != cplx{0.0, 0.0})
                all_zero = false;
        if (all_zero)
            throw std::domain_error("feat_phase_diff: all-zero channel has undefined phase");
    }

    FeatureVector f{FeatureKind::phase_diff, std::vector<double>(kA * 3)};
    for (int a = 0; a < kA; ++a) {
        int slot = 0;
        for (int b = 0; b < kA; ++b) {
            if (b == a)
                continue;
            // circular mean: angle of the sum of unit phasors of y_a conj(y_b)
            cplx acc{0.0, 0.0};
            for (int n = 0; n < kN; ++n) {
                cplx prod = obs.at(a, n) * std::conj(obs.at(b, n));
                double mag = std::abs(prod);
                if (mag > 0.0)
                    acc += prod / mag;
            }
            double v = std::arg(acc);
            if (v <= -kPi)
                v += 2.0 * kPi;
            f.values[a * 3 + slot] = v;
            ++slot;
        }
    }
    return f;
}

FeatureVector extract_features(const IQObservation &obs, FeatureKind kind) {
    switch (kind) {
    case FeatureKind::mean:
        return feat_mean(obs);
    case FeatureKind::std_dev:
        return feat_std(obs);
    case FeatureKind::rms:
        return feat_rms(obs);
    case FeatureKind::phase_diff:
        return feat_phase_diff(obs);
    case FeatureKind::raw_iq:
        break;
    }
    throw std::invalid_argument("extract_features: raw_iq bypasses feature extraction");
}

std::vector<double> raw_tensor(const IQObservation &obs) {
    std::vector<double> t(static_cast<size_t>(2 * kA) * kN);
    for (int a = 0; a < kA; ++a)
        for (int n = 0; n < kN; ++n) {
            t[(static_cast<size_t>(2 * a) + 0) * kN + n] = obs.at(a, n).real();
            t[(static_cast<size_t>(2 * a) + 1) * kN + n] = obs.at(a, n).imag();
        }
    return t;
}

std::vector<double> Normalizer::apply(const std::vector<double> &x) const {
    size_t c = channels();
    if (c == 0 || x.size() % c != 0)
        throw std::invalid_argument("normalizer: tensor length not a multiple of channel count");
    size_t m = x.size() / c;
    std::vector<double> out(x.size());
    for (size_t ch = 0; ch < c; ++ch)
        for (size_t k = 0; k < m; ++k)
            out[ch * m + k] = (x[ch * m + k] - mu[ch]) / sigma[ch];
    return out;
}

std::vector<double> Normalizer::invert(const std::vector<double> &x) const {
    size_t c = channels();
    if (c == 0 || x.size() % c != 0)
        throw std::invalid_argument("normalizer: tensor length not a multiple of channel count");
    size_t m = x.size() / c;
    std::vector<double> out(x.size());
    for (size_t ch = 0; ch < c; ++ch)
        for (size_t k = 0; k < m; ++k)
            out[ch * m + k] = x[ch * m + k] * sigma[ch] + mu[ch];
    return out;
}

Normalizer fit_normalizer(const std::vector<std::vector<double>> &dataset, size_t n_channels,
                          const std::string &fitted_on) {
    if (dataset.empty())
        throw std::invalid_argument("fit_normalizer: empty dataset");
    if (n_channels == 0)
        throw std::invalid_argument("fit_normalizer: need at least one channel");
    size_t len = dataset.front().size();
    if (len == 0 || len % n_channels != 0)
        throw std::invalid_argument("fit_normalizer: tensor length not divisible by channels");
    size_t m = len / n_channels;

    Normalizer norm;
    norm.fitted_on = fitted_on;
    norm.mu.assign(n_channels, 0.0);
    norm.sigma.assign(n_channels, 0.0);

    double count = static_cast<double>(dataset.size() * m);
    for (const auto &t : dataset) {
        if (t.size() != len)
            throw std::invalid_argument("fit_normalizer: inconsistent tensor lengths");
        for (size_t ch = 0; ch < n_channels; ++ch)
            for (size_t k = 0; k < m; ++k)
                norm.mu[ch] += t[ch * m + k];
    }
    for (auto &v : norm.mu)
        v /= count;
    for (const auto &t : dataset)
        for (size_t ch = 0; ch < n_channels; ++ch)
            for (size_t k = 0; k < m; ++k)
                norm.sigma[ch] += sqr(t[ch * m + k] - norm.mu[ch]);
    for (auto &v : norm.sigma)
        v = std::max(std::sqrt(v / count), 1e-6);
    return norm;
}

json normalizer_to_json(const Normalizer &norm) {
    return json{{"format", "rfseeker-normalizer"},
                {"version", kNormalizerFormatVersion},
                {"fitted_on", norm.fitted_on},
                {"n_channels", norm.channels()},
                {"mu", norm.mu},
                {"sigma", norm.sigma}};
}

Normalizer normalizer_from_json(const json &j) {
    if (j.at("format") != "rfseeker-normalizer" ||
        j.at("version") != kNormalizerFormatVersion)
        throw std::runtime_error("normalizer: unsupported file format");
    Normalizer n;
    n.fitted_on = j.at("fitted_on");
    n.mu = j.at("mu").get<std::vector<double>>();
    n.sigma = j.at("sigma").get<std::vector<double>>();
    if (n.mu.size() != n.sigma.size() || n.mu.size() != j.at("n_channels").get<size_t>())
        throw std::runtime_error("normalizer: inconsistent channel arrays");
    for (double s : n.sigma)
        if (!(s > 0.0))
            throw std::runtime_error("normalizer: sigma must be positive");
    return n;
}

void save_normalizer(const Normalizer &norm, const std::filesystem::path &path) {
    io::atomic_write(path, normalizer_to_json(norm).dump(2) + "\n");
}

Normalizer load_normalizer(const std::filesystem::path &path) {
    return normalizer_from_json(json::parse(io::read_text(path)));
}

} // namespace rfseeker
