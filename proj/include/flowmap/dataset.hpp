#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "flowmap/field.hpp"
#include "flowmap/rng.hpp"

namespace flowmap {

inline constexpr int kInputDim = 7;  // x, y, z, re, pr, T, p
inline constexpr int kTargetDim = 3; // u, v, w

struct Sample {
    std::array<double, kInputDim> input;
    std::array<double, kTargetDim> target;
};

/// Per-input-dimension z-score transform. Identity until fitted; constant
/// dimensions keep stddev 1 so they normalize to (numerically) zero.
struct Normalizer {
    std::array<double, kInputDim> mean{};
    std::array<double, kInputDim> stddev{1, 1, 1, 1, 1, 1, 1};

    std::array<double, kInputDim> normalize(const std::array<double, kInputDim>& x) const {
        std::array<double, kInputDim> out;
        for (int d = 0; d < kInputDim; ++d) out[d] = (x[d] - mean[d]) / stddev[d];
        return out;
    }
    std::array<double, kInputDim> denormalize(const std::array<double, kInputDim>& x) const {
        std::array<double, kInputDim> out;
        for (int d = 0; d < kInputDim; ++d) out[d] = x[d] * stddev[d] + mean[d];
        return out;
    }
};

struct SplitRatios {
    double train = 0.70;
    double validation = 0.15;
    double test = 0.15;
};

struct Partition {
    std::vector<std::size_t> train, validation, test;
};

/// Deterministic 70/15/15-style split: Fisher-Yates shuffle of 0..n-1 with
/// SplitMix64(seed), then floor(train*n) / floor(validation*n) / remainder.
inline Partition split(std::size_t n, std::uint64_t seed, SplitRatios ratios = {}) {
    if (n < 3) throw std::invalid_argument("split: need at least 3 samples");
    if (!(ratios.train >= 0.0) || !(ratios.validation >= 0.0) || !(ratios.test >= 0.0) ||
        std::abs(ratios.train + ratios.validation + ratios.test - 1.0) > 1e-9)
        throw std::invalid_argument("split: ratios must be non-negative and sum to 1");

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    SplitMix64 rng(seed);
    fisher_yates(idx, rng);

    // The 1e-9 nudge realizes exact floor semantics when ratio*n sits one
    // rounding error below an integer (e.g. 0.70 * 10).
    const auto n_train = static_cast<std::size_t>(std::floor(ratios.train * static_cast<double>(n) + 1e-9));
    const auto n_val = static_cast<std::size_t>(std::floor(ratios.validation * static_cast<double>(n) + 1e-9));
    if (n_train + n_val > n) throw std::invalid_argument("split: ratios overflow sample count");

    Partition p;
    p.train.assign(idx.begin(), idx.begin() + n_train);
    p.validation.assign(idx.begin() + n_train, idx.begin() + n_train + n_val);
    p.test.assign(idx.begin() + n_train + n_val, idx.end());
    return p;
}

/// Supervised samples plus their split and normalization state. node_index
/// keeps each sample's originating grid node so field-aligned features stay
/// joinable after filtering.
struct SampleSet {
    std::vector<Sample> samples;
    std::vector<std::size_t> node_index;
    Normalizer normalizer;
    Partition partition;
    std::uint64_t split_seed = 0;
};

/// One sample per node, canonical x-fastest order: input (x, y, z, re, pr, T, p),
/// target (u, v, w).
inline std::vector<Sample> build_samples(const FlowSnapshot& s) {
    validate_snapshot(s);
    std::vector<Sample> out;
    out.reserve(s.grid.size());
    for (int k = 0; k < s.grid.nz; ++k)
        for (int j = 0; j < s.grid.ny; ++j)
            for (int i = 0; i < s.grid.nx; ++i) {
                const std::size_t q = s.grid.index(i, j, k);
                Sample sm;
                sm.input = {s.grid.x(i), s.grid.y(j), s.grid.z(k), s.re, s.pr,
                            s.temperature.values[q], s.pressure.values[q]};
                sm.target = {s.velocity.comp[0][q], s.velocity.comp[1][q], s.velocity.comp[2][q]};
                out.push_back(sm);
            }
    return out;
}

inline SampleSet build_sample_set(const FlowSnapshot& s, std::uint64_t seed, SplitRatios ratios = {}) {
    SampleSet set;
    set.samples = build_samples(s);
    set.node_index.resize(set.samples.size());
    std::iota(set.node_index.begin(), set.node_index.end(), std::size_t{0});
    set.partition = split(set.samples.size(), seed, ratios);
    set.split_seed = seed;
    return set;
}

/// Fit z-score statistics on the training partition only and apply them to
/// every sample's inputs; targets are untouched.
inline SampleSet fit_and_apply_normalizer(SampleSet set) {
    if (set.partition.train.empty())
        throw std::invalid_argument("fit_and_apply_normalizer: empty training partition");

    const double n = static_cast<double>(set.partition.train.size());
    Normalizer norm;
    for (int d = 0; d < kInputDim; ++d) {
        double sum = 0.0;
        for (std::size_t idx : set.partition.train) sum += set.samples[idx].input[d];
        const double mean = sum / n;
        double ss = 0.0;
        for (std::size_t idx : set.partition.train) {
            const double dev = set.samples[idx].input[d] - mean;
            ss += dev * dev;
        }
        double sd = std::sqrt(ss / n);
        if (sd < 1e-12 * std::max(1.0, std::abs(mean))) sd = 1.0; // constant dimension
        norm.mean[d] = mean;
        norm.stddev[d] = sd;
    }
    for (auto& sm : set.samples) sm.input = norm.normalize(sm.input);
    set.normalizer = norm;
    return set;
}

/// Keep the ceil(keep_fraction * n) samples with the largest feature values
/// (ties broken by lower sample index), preserving sample order, and re-split
/// with the set's original seed.
inline SampleSet filter_high_re(const SampleSet& set, const ScalarGridField& feature,
                                double keep_fraction, SplitRatios ratios = {}) {
    if (!(keep_fraction > 0.0) || keep_fraction > 1.0)
        throw std::invalid_argument("filter_high_re: keep_fraction must be in (0, 1]");
    const std::size_t n = set.samples.size();
    for (std::size_t node : set.node_index)
        if (node >= feature.values.size())
            throw std::invalid_argument("filter_high_re: feature field does not cover sample nodes");

    const auto keep = static_cast<std::size_t>(
        std::ceil(keep_fraction * static_cast<double>(n) - 1e-9));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double fa = feature.values[set.node_index[a]];
        const double fb = feature.values[set.node_index[b]];
        if (fa != fb) return fa > fb;
        return a < b;
    });
    order.resize(keep);
    std::sort(order.begin(), order.end());

    SampleSet out;
    out.samples.reserve(keep);
    out.node_index.reserve(keep);
    for (std::size_t pos : order) {
        out.samples.push_back(set.samples[pos]);
        out.node_index.push_back(set.node_index[pos]);
    }
    out.normalizer = set.normalizer;
    out.split_seed = set.split_seed;
    out.partition = split(keep, set.split_seed, ratios);
    return out;
}

} // namespace flowmap
