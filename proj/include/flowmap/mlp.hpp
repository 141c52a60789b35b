#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "flowmap/dataset.hpp"
#include "flowmap/errors.hpp"
#include "flowmap/linalg.hpp"
#include "flowmap/rng.hpp"

namespace flowmap {

/// Dense feed-forward model: tanh hidden layers, identity output.
/// weights[l] is row-major (layer_sizes[l+1] x layer_sizes[l]).
struct MlpModel {
    std::vector<int> layer_sizes;
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;

    int input_dim() const { return layer_sizes.front(); }
    int output_dim() const { return layer_sizes.back(); }
    std::size_t layer_count() const { return weights.size(); }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (std::size_t l = 0; l < weights.size(); ++l) n += weights[l].size() + biases[l].size();
        return n;
    }
};

/// Uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)], zero biases, seeded.
inline MlpModel init_mlp(const std::vector<int>& layer_sizes, std::uint64_t seed) {
    if (layer_sizes.size() < 2)
        throw std::invalid_argument("init_mlp: need at least input and output layers");
    for (int s : layer_sizes)
        if (s < 1) throw std::invalid_argument("init_mlp: layer sizes must be positive");

    MlpModel m;
    m.layer_sizes = layer_sizes;
    SplitMix64 rng(seed);
    for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
        const int fan_in = layer_sizes[l];
        const int fan_out = layer_sizes[l + 1];
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        std::vector<double> w(static_cast<std::size_t>(fan_in) * fan_out);
        for (double& x : w) x = rng.uniform(-bound, bound);
        m.weights.push_back(std::move(w));
        m.biases.emplace_back(fan_out, 0.0);
    }
    return m;
}

namespace detail {

struct ForwardScratch {
    std::vector<std::vector<double>> act; // act[l] = activations entering layer l; act[L] = output
};

inline void forward_into(const MlpModel& m, std::span<const double> input, ForwardScratch& ws) {
    const std::size_t layers = m.layer_count();
    ws.act.resize(layers + 1);
    ws.act[0].assign(input.begin(), input.end());
    for (std::size_t l = 0; l < layers; ++l) {
        const int in = m.layer_sizes[l];
        const int out = m.layer_sizes[l + 1];
        const bool hidden = l + 1 < layers;
        auto& a = ws.act[l];
        auto& z = ws.act[l + 1];
        z.assign(static_cast<std::size_t>(out), 0.0);
        const auto& w = m.weights[l];
        for (int r = 0; r < out; ++r) {
            double s = m.biases[l][r];
            const double* row = w.data() + static_cast<std::size_t>(r) * in;
            for (int c = 0; c < in; ++c) s += row[c] * a[c];
            z[r] = hidden ? std::tanh(s) : s;
        }
    }
}

} // namespace detail

/// Evaluate the network on one input vector.
inline std::vector<double> forward(const MlpModel& m, std::span<const double> input) {
    if (static_cast<int>(input.size()) != m.input_dim())
        throw std::invalid_argument("forward: input length does not match model");
    detail::ForwardScratch ws;
    detail::forward_into(m, input, ws);
    return ws.act.back();
}

/// Row-major sample block for training and evaluation.
struct Batch {
    std::size_t count = 0;
    int input_dim = 0;
    int target_dim = 0;
    std::vector<double> inputs;  // count x input_dim
    std::vector<double> targets; // count x target_dim

    std::span<const double> input_row(std::size_t s) const {
        return {inputs.data() + s * input_dim, static_cast<std::size_t>(input_dim)};
    }
    std::span<const double> target_row(std::size_t s) const {
        return {targets.data() + s * target_dim, static_cast<std::size_t>(target_dim)};
    }
};

inline Batch make_batch(const SampleSet& set, const std::vector<std::size_t>& indices) {
    Batch b;
    b.count = indices.size();
    b.input_dim = kInputDim;
    b.target_dim = kTargetDim;
    b.inputs.reserve(b.count * kInputDim);
    b.targets.reserve(b.count * kTargetDim);
    for (std::size_t idx : indices) {
        const Sample& sm = set.samples[idx];
        b.inputs.insert(b.inputs.end(), sm.input.begin(), sm.input.end());
        b.targets.insert(b.targets.end(), sm.target.begin(), sm.target.end());
    }
    return b;
}

/// Half the summed squared residual over a batch.
inline double half_sse(const MlpModel& m, const Batch& batch) {
    detail::ForwardScratch ws;
    double sse = 0.0;
    for (std::size_t s = 0; s < batch.count; ++s) {
        detail::forward_into(m, batch.input_row(s), ws);
        const auto t = batch.target_row(s);
        for (int c = 0; c < batch.target_dim; ++c) {
            const double e = t[c] - ws.act.back()[c];
            sse += e * e;
        }
    }
    return 0.5 * sse;
}

/// Packed parameter vector: per layer, weights row-major then biases.
inline std::vector<double> pack_weights(const MlpModel& m) {
    std::vector<double> w;
    w.reserve(m.parameter_count());
    for (std::size_t l = 0; l < m.layer_count(); ++l) {
        w.insert(w.end(), m.weights[l].begin(), m.weights[l].end());
        w.insert(w.end(), m.biases[l].begin(), m.biases[l].end());
    }
    return w;
}

inline void unpack_weights(MlpModel& m, const std::vector<double>& w) {
    if (w.size() != m.parameter_count())
        throw std::invalid_argument("unpack_weights: parameter count mismatch");
    std::size_t o = 0;
    for (std::size_t l = 0; l < m.layer_count(); ++l) {
        std::copy(w.begin() + o, w.begin() + o + m.weights[l].size(), m.weights[l].begin());
        o += m.weights[l].size();
        std::copy(w.begin() + o, w.begin() + o + m.biases[l].size(), m.biases[l].begin());
        o += m.biases[l].size();
    }
}

/// Jacobian of the outputs with respect to the packed parameters, plus the
/// residual e = target - output. Row order is sample-major, component-minor.
struct JacobianBatch {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> j;        // rows x cols, row-major
    std::vector<double> residual; // rows
};

inline JacobianBatch batch_jacobian(const MlpModel& m, const Batch& batch) {
    if (batch.input_dim != m.input_dim() || batch.target_dim != m.output_dim())
        throw std::invalid_argument("batch_jacobian: batch dimensions do not match model");

    const std::size_t layers = m.layer_count();
    const std::size_t cols = m.parameter_count();
    const int out_dim = m.output_dim();

    JacobianBatch jb;
    jb.rows = batch.count * static_cast<std::size_t>(out_dim);
    jb.cols = cols;
    jb.j.assign(jb.rows * cols, 0.0);
    jb.residual.assign(jb.rows, 0.0);

    // Packed offset of each layer block.
    std::vector<std::size_t> offset(layers);
    {
        std::size_t o = 0;
        for (std::size_t l = 0; l < layers; ++l) {
            offset[l] = o;
            o += m.weights[l].size() + m.biases[l].size();
        }
    }

    detail::ForwardScratch ws;
    std::vector<std::vector<double>> gz(layers + 1); // d(output_c)/d(layer activations)
    for (std::size_t l = 0; l <= layers; ++l) gz[l].resize(m.layer_sizes[l]);

    for (std::size_t s = 0; s < batch.count; ++s) {
        detail::forward_into(m, batch.input_row(s), ws);
        const auto target = batch.target_row(s);
        for (int c = 0; c < out_dim; ++c) {
            const std::size_t r = s * out_dim + c;
            jb.residual[r] = target[c] - ws.act.back()[c];
            double* row = jb.j.data() + r * cols;

            // Seed at the output layer (identity activation).
            std::fill(gz[layers].begin(), gz[layers].end(), 0.0);
            gz[layers][c] = 1.0;

            for (std::size_t l = layers; l-- > 0;) {
                const int in = m.layer_sizes[l];
                const int out = m.layer_sizes[l + 1];
                const auto& a = ws.act[l];
                const auto& g = gz[l + 1];
                double* wrow = row + offset[l];
                for (int r2 = 0; r2 < out; ++r2) {
                    const double gr = g[r2];
                    if (gr != 0.0) {
                        double* dst = wrow + static_cast<std::size_t>(r2) * in;
                        for (int c2 = 0; c2 < in; ++c2) dst[c2] = gr * a[c2];
                    }
                    wrow[static_cast<std::size_t>(in) * out + r2] = gr; // bias slot
                }
                if (l == 0) break;
                // Propagate through W_l and the tanh of layer l.
                auto& gprev = gz[l];
                const auto& w = m.weights[l];
                for (int c2 = 0; c2 < in; ++c2) {
                    double sacc = 0.0;
                    for (int r2 = 0; r2 < out; ++r2)
                        sacc += w[static_cast<std::size_t>(r2) * in + c2] * g[r2];
                    gprev[c2] = sacc * (1.0 - a[c2] * a[c2]); // act[l] = tanh(z_l)
                }
            }
        }
    }
    return jb;
}

inline std::vector<double> compute_jtj(const JacobianBatch& jb) {
    const std::size_t n = jb.cols;
    std::vector<double> jtj(n * n, 0.0);
    for (std::size_t r = 0; r < jb.rows; ++r) {
        const double* row = jb.j.data() + r * n;
        for (std::size_t i = 0; i < n; ++i) {
            const double ri = row[i];
            if (ri == 0.0) continue;
            double* dst = jtj.data() + i * n;
            for (std::size_t j = i; j < n; ++j) dst[j] += ri * row[j];
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) jtj[i * n + j] = jtj[j * n + i];
    return jtj;
}

inline std::vector<double> compute_jte(const JacobianBatch& jb) {
    std::vector<double> jte(jb.cols, 0.0);
    for (std::size_t r = 0; r < jb.rows; ++r) {
        const double e = jb.residual[r];
        if (e == 0.0) continue;
        const double* row = jb.j.data() + r * jb.cols;
        for (std::size_t c = 0; c < jb.cols; ++c) jte[c] += row[c] * e;
    }
    return jte;
}

/// Damped regularized Gauss-Newton step on a packed parameter vector:
/// solve (beta JtJ + (mu+alpha) I) delta = beta Jte - alpha w by Cholesky
/// and return w + delta. nullopt signals a numerically indefinite system;
/// the caller raises mu and retries.
inline std::optional<std::vector<double>> lm_br_step(const std::vector<double>& w,
                                                     const std::vector<double>& jtj,
                                                     const std::vector<double>& jte, double mu,
                                                     double alpha, double beta) {
    if (!(mu > 0.0)) throw std::invalid_argument("lm_br_step: mu must be positive");
    const std::size_t n = w.size();
    std::vector<double> a(jtj);
    const double damp = mu + alpha;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) a[i * n + j] *= beta;
        a[i * n + i] += damp;
    }
    if (!cholesky_factor(a, n)) return std::nullopt;
    std::vector<double> delta(n);
    for (std::size_t i = 0; i < n; ++i) delta[i] = beta * jte[i] - alpha * w[i];
    cholesky_solve(a, n, delta);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = w[i] + delta[i];
        if (!std::isfinite(out[i])) return std::nullopt;
    }
    return out;
}

/// Convenience overload on a model plus its Jacobian batch.
inline std::optional<MlpModel> lm_br_step(const MlpModel& m, const JacobianBatch& jb, double mu,
                                          double alpha, double beta) {
    const auto cand = lm_br_step(pack_weights(m), compute_jtj(jb), compute_jte(jb), mu, alpha, beta);
    if (!cand) return std::nullopt;
    MlpModel out = m;
    unpack_weights(out, *cand);
    return out;
}

inline constexpr double kAlphaMax = 1e10;
inline constexpr double kBetaMin = 1e-10;
inline constexpr double kBetaMax = 1e10;

struct EvidenceUpdate {
    double alpha = 0.0;
    double beta = 1.0;
    double gamma = 0.0;
};

/// Gauss-Newton evidence reestimation:
///   gamma  = N_w - 2 alpha tr(H^-1),  H = 2 beta JtJ + 2 alpha I
///   alpha' = gamma / (2 E_W),  beta' = (n_rows - gamma) / (2 E_D)
/// with clamps keeping both finite when E_W or E_D reaches zero.
inline EvidenceUpdate update_evidence_hyperparams(const std::vector<double>& jtj, std::size_t n_w,
                                                  double data_error, double weight_error,
                                                  double alpha, double beta, std::size_t n_rows) {
    if (data_error < 0.0 || weight_error < 0.0)
        throw std::invalid_argument("update_evidence_hyperparams: negative error term");

    double gamma;
    if (alpha == 0.0) {
        gamma = static_cast<double>(n_w);
    } else {
        const std::size_t n = n_w;
        std::vector<double> h(jtj);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) h[i * n + j] *= 2.0 * beta;
            h[i * n + i] += 2.0 * alpha;
        }
        if (!cholesky_factor(h, n))
            throw NumericError("update_evidence_hyperparams: H is singular; raise mu and retry");
        const double trace = cholesky_inverse_trace(h, n);
        gamma = static_cast<double>(n_w) - 2.0 * alpha * trace;
        gamma = std::min(std::max(gamma, 0.0), static_cast<double>(n_w));
    }

    EvidenceUpdate out;
    out.gamma = gamma;
    out.alpha = weight_error > 0.0 ? std::min(gamma / (2.0 * weight_error), kAlphaMax) : kAlphaMax;
    out.beta = data_error > 0.0
                   ? std::min(std::max((static_cast<double>(n_rows) - gamma) / (2.0 * data_error), kBetaMin),
                              kBetaMax)
                   : kBetaMax;
    return out;
}

enum class StopReason { MaxEpochs, MuExceeded, GradientTol };

inline const char* to_string(StopReason r) {
    switch (r) {
        case StopReason::MaxEpochs: return "MaxEpochs";
        case StopReason::MuExceeded: return "MuExceeded";
        case StopReason::GradientTol: return "GradientTol";
    }
    return "MaxEpochs";
}

inline StopReason stop_reason_from_string(const std::string& s) {
    if (s == "MaxEpochs") return StopReason::MaxEpochs;
    if (s == "MuExceeded") return StopReason::MuExceeded;
    if (s == "GradientTol") return StopReason::GradientTol;
    throw ParseError("unknown stop reason '" + s + "'");
}

struct TrainConfig {
    std::vector<int> hidden_layers{10};
    int max_epochs = 500;
    double mu0 = 1e-3;
    double mu_inc = 10.0;
    double mu_dec = 0.1;
    double mu_max = 1e10;
    double grad_tol = 1e-7;
    std::uint64_t seed = 0;
    double alpha0 = 0.0;
    double beta0 = 1.0;
};

inline void validate(const TrainConfig& cfg) {
    if (!(cfg.mu_inc > 1.0) || !(cfg.mu_dec > 0.0) || !(cfg.mu_dec < 1.0))
        throw std::invalid_argument("TrainConfig: need mu_inc > 1 > mu_dec > 0");
    if (!(cfg.mu0 > 0.0) || !(cfg.mu_max > cfg.mu0))
        throw std::invalid_argument("TrainConfig: need mu_max > mu0 > 0");
    if (cfg.max_epochs < 1) throw std::invalid_argument("TrainConfig: max_epochs must be >= 1");
    if (cfg.grad_tol < 0.0) throw std::invalid_argument("TrainConfig: grad_tol must be >= 0");
    if (cfg.alpha0 < 0.0 || !(cfg.beta0 > 0.0))
        throw std::invalid_argument("TrainConfig: need alpha0 >= 0 and beta0 > 0");
    if (cfg.hidden_layers.size() > 10)
        throw std::invalid_argument("TrainConfig: at most 10 hidden layers");
    for (int h : cfg.hidden_layers)
        if (h < 1) throw std::invalid_argument("TrainConfig: hidden layer sizes must be positive");
}

struct EpochRecord {
    int epoch = 0;           // 1-based
    double mu = 0.0;         // damping after the epoch
    double data_error = 0.0; // E_D = half SSE on the training partition
    double weight_error = 0.0;
    double objective = 0.0;  // beta*E_D + alpha*E_W with this epoch's alpha, beta
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double grad_norm = 0.0;  // |beta Jte - alpha w| at epoch start
    double validation_error = 0.0;
    bool accepted = false;
};

struct TrainTrace {
    std::vector<EpochRecord> records;
    StopReason stop_reason = StopReason::MaxEpochs;

    int epochs_run() const { return static_cast<int>(records.size()); }
    double final_mu() const { return records.empty() ? 0.0 : records.back().mu; }
};

/// Thrown when the objective turns non-finite; carries the trace so far.
class TrainingError : public NumericError {
public:
    TrainingError(const std::string& what, TrainTrace trace)
        : NumericError(what), trace(std::move(trace)) {}
    TrainTrace trace;
};

struct TrainResult {
    MlpModel model;
    TrainTrace trace;
};

inline constexpr double kMuFloor = 1e-20;

/// Full-batch Levenberg-Marquardt with evidence-updated regularization over
/// explicit batches and architecture. Per epoch: linearize at the current
/// weights, propose damped steps until one strictly lowers
/// F = beta*E_D + alpha*E_W (raising mu by mu_inc per rejection), then
/// reestimate alpha/beta/gamma. Stops on mu explosion, gradient tolerance,
/// or the epoch budget. Deterministic in (batches, arch, cfg).
inline TrainResult train_mlp_core(const Batch& train, const Batch& val,
                                  const std::vector<int>& arch, const TrainConfig& cfg) {
    validate(cfg);
    if (train.count == 0) throw std::invalid_argument("train_mlp: empty training partition");
    if (arch.size() < 2 || arch.front() != train.input_dim || arch.back() != train.target_dim)
        throw std::invalid_argument("train_mlp: architecture does not match batch dimensions");

    MlpModel model = init_mlp(arch, cfg.seed);
    std::vector<double> w = pack_weights(model);
    const std::size_t n_w = w.size();

    double mu = cfg.mu0;
    double alpha = cfg.alpha0;
    double beta = cfg.beta0;
    double gamma = static_cast<double>(n_w);

    TrainTrace trace;
    MlpModel candidate = model;

    const auto weight_error_of = [](const std::vector<double>& ws) {
        double s = 0.0;
        for (double x : ws) s += x * x;
        return 0.5 * s;
    };

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        const JacobianBatch jb = batch_jacobian(model, train);
        const std::vector<double> jte = compute_jte(jb);

        double e_d = 0.0;
        for (double e : jb.residual) e_d += e * e;
        e_d *= 0.5;
        double e_w = weight_error_of(w);
        double objective = beta * e_d + alpha * e_w;

        double grad_norm = 0.0;
        for (std::size_t i = 0; i < n_w; ++i) {
            const double g = beta * jte[i] - alpha * w[i];
            grad_norm += g * g;
        }
        grad_norm = std::sqrt(grad_norm);

        if (!std::isfinite(objective)) {
            throw TrainingError("train_mlp: non-finite objective at epoch " + std::to_string(epoch),
                                std::move(trace));
        }

        const auto record = [&](bool accepted) {
            EpochRecord r;
            r.epoch = epoch;
            r.mu = mu;
            r.data_error = e_d;
            r.weight_error = e_w;
            r.objective = objective;
            r.alpha = alpha;
            r.beta = beta;
            r.gamma = gamma;
            r.grad_norm = grad_norm;
            r.validation_error = val.count > 0 ? half_sse(model, val) : 0.0;
            r.accepted = accepted;
            trace.records.push_back(r);
        };

        if (grad_norm < cfg.grad_tol) {
            record(false);
            trace.stop_reason = StopReason::GradientTol;
            return {std::move(model), std::move(trace)};
        }

        const std::vector<double> jtj = compute_jtj(jb);

        bool accepted = false;
        while (true) {
            const auto cand_w = lm_br_step(w, jtj, jte, mu, alpha, beta);
            if (cand_w) {
                unpack_weights(candidate, *cand_w);
                const double e_d_cand = half_sse(candidate, train);
                const double e_w_cand = weight_error_of(*cand_w);
                const double f_cand = beta * e_d_cand + alpha * e_w_cand;
                if (std::isfinite(f_cand) && f_cand < objective) {
                    w = *cand_w;
                    std::swap(model, candidate);
                    e_d = e_d_cand;
                    e_w = e_w_cand;
                    objective = f_cand;
                    mu = std::max(mu * cfg.mu_dec, kMuFloor);
                    accepted = true;
                    break;
                }
            }
            mu *= cfg.mu_inc;
            if (mu > cfg.mu_max) break;
        }

        if (!accepted) {
            record(false);
            trace.stop_reason = StopReason::MuExceeded;
            return {std::move(model), std::move(trace)};
        }

        // Evidence reestimation uses this epoch's linearization with the
        // post-step errors; a singular H leaves alpha/beta unchanged.
        double alpha_next = alpha, beta_next = beta;
        try {
            const EvidenceUpdate eu =
                update_evidence_hyperparams(jtj, n_w, e_d, e_w, alpha, beta, jb.rows);
            alpha_next = eu.alpha;
            beta_next = eu.beta;
            gamma = eu.gamma;
        } catch (const NumericError&) {
        }

        record(true);
        alpha = alpha_next;
        beta = beta_next;
    }

    trace.stop_reason = StopReason::MaxEpochs;
    return {std::move(model), std::move(trace)};
}

/// Train on a sample set's training partition; the architecture is the
/// dataset input/target dims around cfg.hidden_layers. Validation error is
/// recorded per epoch for reporting only and never gates training.
inline TrainResult train_mlp(const SampleSet& set, const TrainConfig& cfg) {
    if (set.partition.train.empty())
        throw std::invalid_argument("train_mlp: empty training partition");
    std::vector<int> arch;
    arch.push_back(kInputDim);
    arch.insert(arch.end(), cfg.hidden_layers.begin(), cfg.hidden_layers.end());
    arch.push_back(kTargetDim);
    return train_mlp_core(make_batch(set, set.partition.train),
                          make_batch(set, set.partition.validation), arch, cfg);
}

/// Model file: "#mlp 1", the layer sizes, then per layer one row-major
/// weight line and one bias line, 17 significant digits.
inline void save_mlp(const MlpModel& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    out << "#mlp 1\n";
    for (std::size_t i = 0; i < m.layer_sizes.size(); ++i)
        out << (i ? " " : "") << m.layer_sizes[i];
    out << '\n';
    const auto write_line = [&](const std::vector<double>& v) {
        char buf[32];
        for (std::size_t i = 0; i < v.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", v[i]);
            out << (i ? " " : "") << buf;
        }
        out << '\n';
    };
    for (std::size_t l = 0; l < m.layer_count(); ++l) {
        write_line(m.weights[l]);
        write_line(m.biases[l]);
    }
    if (!out) throw ParseError("write failed for '" + path + "'");
}

inline MlpModel load_mlp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line != "#mlp 1")
        throw ParseError(path + ":1: expected header '#mlp 1'");
    if (!std::getline(in, line)) throw ParseError(path + ":2: missing layer sizes");
    std::istringstream sizes_line(line);
    std::vector<int> sizes;
    int v;
    while (sizes_line >> v) sizes.push_back(v);
    if (sizes.size() < 2) throw ParseError(path + ":2: need at least two layer sizes");
    for (int s : sizes)
        if (s < 1) throw ParseError(path + ":2: layer sizes must be positive");

    MlpModel m;
    m.layer_sizes = sizes;
    std::size_t lineno = 2;
    const auto read_line = [&](std::size_t expected) {
        ++lineno;
        if (!std::getline(in, line))
            throw ParseError(path + ":" + std::to_string(lineno) + ": unexpected end of file");
        std::istringstream row(line);
        std::vector<double> vals;
        std::string tok;
        while (row >> tok) {
            char* end = nullptr;
            const double x = std::strtod(tok.c_str(), &end);
            if (end == tok.c_str() || *end != '\0' || !std::isfinite(x))
                throw ParseError(path + ":" + std::to_string(lineno) + ": bad value '" + tok + "'");
            vals.push_back(x);
        }
        if (vals.size() != expected)
            throw ParseError(path + ":" + std::to_string(lineno) + ": expected " +
                             std::to_string(expected) + " values, found " + std::to_string(vals.size()));
        return vals;
    };
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        const auto fan_in = static_cast<std::size_t>(sizes[l]);
        const auto fan_out = static_cast<std::size_t>(sizes[l + 1]);
        m.weights.push_back(read_line(fan_in * fan_out));
        m.biases.push_back(read_line(fan_out));
    }
    return m;
}

} // namespace flowmap
