#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "flowmap/matrix.hpp"
#include "flowmap/rng.hpp"

namespace flowmap {

/// Rectangular Kohonen lattice. Nodes are indexed row-major; lattice
/// distance is Euclidean on integer (row, col) coordinates.
struct SomLattice {
    int rows = 0;
    int cols = 0;
    int dim = 0;
    std::vector<double> weights; // (rows*cols) x dim, node-major

    int node_count() const { return rows * cols; }
    int node_index(int r, int c) const { return r * cols + c; }
    int node_row(int node) const { return node / cols; }
    int node_col(int node) const { return node % cols; }

    std::span<double> node_weight(int node) {
        return {weights.data() + static_cast<std::size_t>(node) * dim, static_cast<std::size_t>(dim)};
    }
    std::span<const double> node_weight(int node) const {
        return {weights.data() + static_cast<std::size_t>(node) * dim, static_cast<std::size_t>(dim)};
    }
};

struct SomConfig {
    int epochs = 50;
    double eta0 = 0.5;
    double eta_f = 0.01;
    double sigma0 = 0.0; // <= 0 resolves to max(rows, cols) / 2 at train time
    double sigma_f = 0.5;
    std::uint64_t seed = 0;
};

namespace detail {

inline void check_som_data(const std::vector<std::vector<double>>& data, int dim) {
    for (const auto& x : data) {
        if (static_cast<int>(x.size()) != dim)
            throw std::invalid_argument("som: data vector length does not match lattice dim");
        for (double v : x)
            if (!std::isfinite(v)) throw std::invalid_argument("som: non-finite data entry");
    }
}

} // namespace detail

/// Weights drawn uniformly within the per-dimension bounding box of the data.
inline SomLattice init_som(int rows, int cols, int dim, const std::vector<std::vector<double>>& data,
                           std::uint64_t seed) {
    if (rows < 1 || cols < 1 || dim < 1)
        throw std::invalid_argument("init_som: rows, cols, dim must be positive");
    if (data.empty()) throw std::invalid_argument("init_som: empty data");
    detail::check_som_data(data, dim);

    std::vector<double> lo(dim, std::numeric_limits<double>::infinity());
    std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
    for (const auto& x : data)
        for (int d = 0; d < dim; ++d) {
            lo[d] = std::min(lo[d], x[d]);
            hi[d] = std::max(hi[d], x[d]);
        }

    SomLattice som;
    som.rows = rows;
    som.cols = cols;
    som.dim = dim;
    som.weights.resize(static_cast<std::size_t>(rows) * cols * dim);
    SplitMix64 rng(seed);
    for (double& w : som.weights) w = 0.0;
    for (int node = 0; node < som.node_count(); ++node) {
        auto w = som.node_weight(node);
        for (int d = 0; d < dim; ++d) w[d] = rng.uniform(lo[d], hi[d]);
    }
    return som;
}

/// Best-matching unit: nearest weight vector in squared Euclidean distance,
/// ties resolved to the smallest row-major node index.
inline int find_bmu(const SomLattice& som, std::span<const double> x) {
    if (static_cast<int>(x.size()) != som.dim)
        throw std::invalid_argument("find_bmu: input length does not match lattice dim");
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int node = 0; node < som.node_count(); ++node) {
        const auto w = som.node_weight(node);
        double d = 0.0;
        for (int c = 0; c < som.dim; ++c) {
            const double diff = x[c] - w[c];
            d += diff * diff;
        }
        if (d < best_d) {
            best_d = d;
            best = node;
        }
    }
    return best;
}

/// Gaussian neighborhood kernel exp(-d^2 / (2 sigma^2)).
inline double neighborhood_weight(double lattice_distance, double sigma) {
    if (lattice_distance < 0.0 || !(sigma > 0.0))
        throw std::invalid_argument("neighborhood_weight: need d >= 0 and sigma > 0");
    return std::exp(-(lattice_distance * lattice_distance) / (2.0 * sigma * sigma));
}

/// Classic per-sample Kohonen training with exponentially decaying learning
/// rate and radius. Every node moves toward each presented vector by
/// eta(t) * kernel(lattice distance to the BMU, sigma(t)).
inline SomLattice train_som(SomLattice som, const std::vector<std::vector<double>>& data,
                            const SomConfig& cfg) {
    detail::check_som_data(data, som.dim);
    if (cfg.epochs < 1) throw std::invalid_argument("SomConfig: epochs must be >= 1");
    if (!(cfg.eta_f > 0.0) || !(cfg.eta0 >= cfg.eta_f) || cfg.eta0 > 1.0)
        throw std::invalid_argument("SomConfig: need 1 >= eta0 >= eta_f > 0");
    const double sigma0 = cfg.sigma0 > 0.0 ? cfg.sigma0 : std::max(som.rows, som.cols) / 2.0;
    if (!(cfg.sigma_f > 0.0) || !(sigma0 >= cfg.sigma_f))
        throw std::invalid_argument("SomConfig: need sigma0 >= sigma_f > 0");
    if (data.empty()) return som;

    const double t_span = cfg.epochs > 1 ? static_cast<double>(cfg.epochs - 1) : 1.0;
    SplitMix64 rng(cfg.seed);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    // Squared lattice distances are integers; memoize the kernel per epoch.
    const int d2_max = (som.rows - 1) * (som.rows - 1) + (som.cols - 1) * (som.cols - 1);
    std::vector<double> kernel(static_cast<std::size_t>(d2_max) + 1);

    for (int t = 0; t < cfg.epochs; ++t) {
        const double frac = static_cast<double>(t) / t_span;
        const double eta = cfg.eta0 * std::pow(cfg.eta_f / cfg.eta0, frac);
        const double sigma = sigma0 * std::pow(cfg.sigma_f / sigma0, frac);
        const double inv_two_sigma2 = 1.0 / (2.0 * sigma * sigma);
        for (int d2 = 0; d2 <= d2_max; ++d2) kernel[d2] = eta * std::exp(-d2 * inv_two_sigma2);

        fisher_yates(order, rng);
        for (std::size_t idx : order) {
            const auto& x = data[idx];
            const int bmu = find_bmu(som, x);
            const int br = som.node_row(bmu);
            const int bc = som.node_col(bmu);
            for (int node = 0; node < som.node_count(); ++node) {
                const int dr = som.node_row(node) - br;
                const int dc = som.node_col(node) - bc;
                const double hw = kernel[dr * dr + dc * dc];
                auto w = som.node_weight(node);
                for (int c = 0; c < som.dim; ++c) w[c] += hw * (x[c] - w[c]);
            }
        }
    }
    return som;
}

/// Count of data vectors whose BMU is each node.
inline MatI hit_map(const SomLattice& som, const std::vector<std::vector<double>>& data) {
    detail::check_som_data(data, som.dim);
    MatI hits(static_cast<std::size_t>(som.rows), static_cast<std::size_t>(som.cols));
    for (const auto& x : data) {
        const int bmu = find_bmu(som, x);
        ++hits.at(static_cast<std::size_t>(som.node_row(bmu)), static_cast<std::size_t>(som.node_col(bmu)));
    }
    return hits;
}

/// Per-node view of one weight coordinate.
inline MatD component_plane(const SomLattice& som, int component) {
    if (component < 0 || component >= som.dim)
        throw std::out_of_range("component_plane: component out of range");
    MatD plane(static_cast<std::size_t>(som.rows), static_cast<std::size_t>(som.cols));
    for (int node = 0; node < som.node_count(); ++node)
        plane.at(static_cast<std::size_t>(som.node_row(node)), static_cast<std::size_t>(som.node_col(node))) =
            som.node_weight(node)[component];
    return plane;
}

struct FeaturePeak {
    int node = 0;
    double score = 0.0;
};

/// Nodes ranked by the summed feature value of the data hitting them;
/// top-k, ties by row-major index, truncated to the node count.
inline std::vector<FeaturePeak> feature_peaks(const SomLattice& som,
                                              const std::vector<std::vector<double>>& data,
                                              const std::vector<double>& feature_values, int k) {
    if (k < 1) throw std::invalid_argument("feature_peaks: k must be >= 1");
    if (feature_values.size() != data.size())
        throw std::invalid_argument("feature_peaks: feature values must align with data");
    detail::check_som_data(data, som.dim);

    std::vector<double> score(static_cast<std::size_t>(som.node_count()), 0.0);
    for (std::size_t i = 0; i < data.size(); ++i) score[find_bmu(som, data[i])] += feature_values[i];

    std::vector<int> nodes(som.node_count());
    std::iota(nodes.begin(), nodes.end(), 0);
    std::sort(nodes.begin(), nodes.end(), [&](int a, int b) {
        if (score[a] != score[b]) return score[a] > score[b];
        return a < b;
    });
    const int take = std::min<int>(k, som.node_count());
    std::vector<FeaturePeak> out;
    out.reserve(static_cast<std::size_t>(take));
    for (int i = 0; i < take; ++i) out.push_back({nodes[i], score[nodes[i]]});
    return out;
}

/// Mean Euclidean distance from each datum to its BMU.
inline double quantization_error(const SomLattice& som, const std::vector<std::vector<double>>& data) {
    if (data.empty()) throw std::invalid_argument("quantization_error: empty data");
    detail::check_som_data(data, som.dim);
    double total = 0.0;
    for (const auto& x : data) {
        const auto w = som.node_weight(find_bmu(som, x));
        double d = 0.0;
        for (int c = 0; c < som.dim; ++c) {
            const double diff = x[c] - w[c];
            d += diff * diff;
        }
        total += std::sqrt(d);
    }
    return total / static_cast<double>(data.size());
}

} // namespace flowmap
