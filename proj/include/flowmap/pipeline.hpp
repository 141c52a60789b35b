#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "flowmap/dataset.hpp"
#include "flowmap/errors.hpp"
#include "flowmap/matrix.hpp"
#include "flowmap/mlp.hpp"
#include "flowmap/nsops.hpp"
#include "flowmap/snapshot.hpp"
#include "flowmap/som.hpp"

namespace flowmap {

/// Fraction of samples whose prediction lies within a relative tolerance of
/// the target: |pred - target|_2 <= tau * (|target|_2 + 1e-8).
inline double accuracy_within_tol(const std::vector<std::vector<double>>& predictions,
                                  const std::vector<std::vector<double>>& targets, double tau) {
    if (predictions.empty()) throw std::invalid_argument("accuracy_within_tol: empty input");
    if (predictions.size() != targets.size())
        throw std::invalid_argument("accuracy_within_tol: prediction/target count mismatch");
    if (!(tau > 0.0)) throw std::invalid_argument("accuracy_within_tol: tau must be positive");

    std::size_t hits = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        if (predictions[i].size() != targets[i].size())
            throw std::invalid_argument("accuracy_within_tol: dimension mismatch at sample " +
                                        std::to_string(i));
        double err2 = 0.0, t2 = 0.0;
        for (std::size_t c = 0; c < targets[i].size(); ++c) {
            const double d = predictions[i][c] - targets[i][c];
            err2 += d * d;
            t2 += targets[i][c] * targets[i][c];
        }
        if (std::sqrt(err2) <= tau * (std::sqrt(t2) + 1e-8)) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

/// ASCII portable graymap, linearly mapped so min -> 0 and max -> 255
/// (a constant matrix maps to all zeros).
inline void render_pgm(const MatD& m, const std::string& path) {
    if (m.rows == 0 || m.cols == 0) throw std::invalid_argument("render_pgm: empty matrix");
    for (double v : m.data)
        if (!std::isfinite(v)) throw std::invalid_argument("render_pgm: non-finite matrix entry");

    const double lo = *std::min_element(m.data.begin(), m.data.end());
    const double hi = *std::max_element(m.data.begin(), m.data.end());
    const double span = hi - lo;

    std::ofstream out(path);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    out << "P2\n" << m.cols << ' ' << m.rows << "\n255\n";
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < m.cols; ++c) {
            const long pix = span > 0.0 ? std::lround(255.0 * (m.at(r, c) - lo) / span) : 0L;
            out << (c ? " " : "") << pix;
        }
        out << '\n';
    }
    if (!out) throw ParseError("write failed for '" + path + "'");
}

template <typename T>
inline void write_matrix_csv(const Mat<T>& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    for (std::size_t r = 0; r < m.rows; ++r) {
        for (std::size_t c = 0; c < m.cols; ++c) {
            if (c) out << ',';
            if constexpr (std::is_floating_point_v<T>) {
                out << detail::fmt17(m.at(r, c));
            } else {
                out << m.at(r, c);
            }
        }
        out << '\n';
    }
    if (!out) throw ParseError("write failed for '" + path + "'");
}

inline MatD read_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<double> row;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            std::size_t comma = line.find(',', pos);
            if (comma == std::string::npos) comma = line.size();
            std::string tok = line.substr(pos, comma - pos);
            const auto b = tok.find_first_not_of(" \t\r");
            if (b == std::string::npos) throw ParseError(path + ":" + std::to_string(lineno) + ": empty cell");
            const auto e = tok.find_last_not_of(" \t\r");
            tok = tok.substr(b, e - b + 1);
            row.push_back(detail::parse_double(tok, path, lineno));
            pos = comma + 1;
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw ParseError(path + ":" + std::to_string(lineno) + ": ragged row (expected " +
                             std::to_string(rows.front().size()) + " cells, found " +
                             std::to_string(row.size()) + ")");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(path + ": no matrix rows");
    MatD m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < m.rows; ++r)
        for (std::size_t c = 0; c < m.cols; ++c) m.at(r, c) = rows[r][c];
    return m;
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

struct GeneratorSpec {
    std::string kind = "rand"; // tg | abc | rand
    int n = 16;
    double re = 100.0;
    double pr = 0.7;
    std::uint64_t seed = 0;
    double amplitude = 1.0; // rand only
    double a = 1.0, b = 1.0, c = 1.0; // abc only
};

struct SnapshotSource {
    bool is_file = false;
    std::string path;
    GeneratorSpec gen;

    std::string label() const {
        if (is_file) return path;
        return gen.kind + "(n=" + std::to_string(gen.n) + ",seed=" + std::to_string(gen.seed) + ")";
    }
};

inline FlowSnapshot resolve_snapshot(const SnapshotSource& src) {
    if (src.is_file) return load_snapshot(src.path);
    const double two_pi = 2.0 * std::numbers::pi;
    const Grid3 grid(src.gen.n, src.gen.n, src.gen.n, two_pi, two_pi, two_pi);
    if (src.gen.kind == "tg") return taylor_green_snapshot(grid, src.gen.re, src.gen.pr);
    if (src.gen.kind == "abc")
        return abc_snapshot(grid, src.gen.a, src.gen.b, src.gen.c, src.gen.re, src.gen.pr);
    if (src.gen.kind == "rand")
        return random_solenoidal_snapshot(grid, src.gen.seed, src.gen.amplitude, src.gen.re, src.gen.pr);
    throw std::invalid_argument("unknown generator kind '" + src.gen.kind + "'");
}

struct DatasetOptions {
    std::uint64_t seed = 1;
    double keep_fraction = 1.0;
};

struct PipelineConfig {
    std::vector<SnapshotSource> snapshots;
    DatasetOptions dataset;
    TrainConfig mlp;
    int som_rows = 8;
    int som_cols = 8;
    SomConfig som;
    double tau = 0.10;
};

/// Reproduction defaults: six seeded random solenoidal 16^3 snapshots through
/// the stock two-tier settings.
inline PipelineConfig default_pipeline_config() {
    PipelineConfig cfg;
    for (std::uint64_t s = 1; s <= 6; ++s) {
        SnapshotSource src;
        src.is_file = false;
        src.gen.kind = "rand";
        src.gen.n = 16;
        src.gen.re = 100.0;
        src.gen.pr = 0.7;
        src.gen.seed = s;
        src.gen.amplitude = 1.0;
        cfg.snapshots.push_back(src);
    }
    return cfg;
}

namespace detail {

using nlohmann::json;

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<T>();
}

} // namespace detail

inline PipelineConfig parse_pipeline_config(const nlohmann::json& j) {
    using detail::get_or;
    PipelineConfig cfg;
    if (!j.contains("snapshots") || !j.at("snapshots").is_array() || j.at("snapshots").empty())
        throw ParseError("config: missing or empty 'snapshots' list");
    for (const auto& e : j.at("snapshots")) {
        SnapshotSource src;
        if (e.is_string()) {
            src.is_file = true;
            src.path = e.get<std::string>();
        } else if (e.is_object()) {
            src.is_file = false;
            src.gen.kind = get_or<std::string>(e, "kind", "rand");
            if (src.gen.kind != "tg" && src.gen.kind != "abc" && src.gen.kind != "rand")
                throw ParseError("config: unknown snapshot kind '" + src.gen.kind + "'");
            src.gen.n = get_or<int>(e, "n", 16);
            src.gen.re = get_or<double>(e, "re", 100.0);
            src.gen.pr = get_or<double>(e, "pr", 0.7);
            src.gen.seed = get_or<std::uint64_t>(e, "seed", 0);
            src.gen.amplitude = get_or<double>(e, "amplitude", 1.0);
            src.gen.a = get_or<double>(e, "a", 1.0);
            src.gen.b = get_or<double>(e, "b", 1.0);
            src.gen.c = get_or<double>(e, "c", 1.0);
        } else {
            throw ParseError("config: snapshot entries must be file paths or generator objects");
        }
        cfg.snapshots.push_back(std::move(src));
    }
    if (j.contains("dataset")) {
        const auto& d = j.at("dataset");
        cfg.dataset.seed = detail::get_or<std::uint64_t>(d, "seed", cfg.dataset.seed);
        cfg.dataset.keep_fraction = detail::get_or<double>(d, "keep_fraction", cfg.dataset.keep_fraction);
    }
    if (j.contains("mlp")) {
        const auto& m = j.at("mlp");
        cfg.mlp.hidden_layers = detail::get_or<std::vector<int>>(m, "layers", cfg.mlp.hidden_layers);
        cfg.mlp.max_epochs = detail::get_or<int>(m, "max_epochs", cfg.mlp.max_epochs);
        cfg.mlp.mu0 = detail::get_or<double>(m, "mu0", cfg.mlp.mu0);
        cfg.mlp.mu_inc = detail::get_or<double>(m, "mu_inc", cfg.mlp.mu_inc);
        cfg.mlp.mu_dec = detail::get_or<double>(m, "mu_dec", cfg.mlp.mu_dec);
        cfg.mlp.mu_max = detail::get_or<double>(m, "mu_max", cfg.mlp.mu_max);
        cfg.mlp.grad_tol = detail::get_or<double>(m, "grad_tol", cfg.mlp.grad_tol);
        cfg.mlp.seed = detail::get_or<std::uint64_t>(m, "seed", cfg.mlp.seed);
        cfg.mlp.alpha0 = detail::get_or<double>(m, "alpha0", cfg.mlp.alpha0);
        cfg.mlp.beta0 = detail::get_or<double>(m, "beta0", cfg.mlp.beta0);
    }
    if (j.contains("som")) {
        const auto& s = j.at("som");
        cfg.som_rows = detail::get_or<int>(s, "rows", cfg.som_rows);
        cfg.som_cols = detail::get_or<int>(s, "cols", cfg.som_cols);
        cfg.som.epochs = detail::get_or<int>(s, "epochs", cfg.som.epochs);
        cfg.som.eta0 = detail::get_or<double>(s, "eta0", cfg.som.eta0);
        cfg.som.eta_f = detail::get_or<double>(s, "eta_f", cfg.som.eta_f);
        cfg.som.sigma0 = detail::get_or<double>(s, "sigma0", cfg.som.sigma0);
        cfg.som.sigma_f = detail::get_or<double>(s, "sigma_f", cfg.som.sigma_f);
        cfg.som.seed = detail::get_or<std::uint64_t>(s, "seed", cfg.som.seed);
    }
    if (j.contains("accuracy")) cfg.tau = detail::get_or<double>(j.at("accuracy"), "tau", cfg.tau);
    if (!(cfg.tau > 0.0)) throw ParseError("config: accuracy.tau must be positive");
    return cfg;
}

inline PipelineConfig load_pipeline_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    try {
        return parse_pipeline_config(j);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Report
// ---------------------------------------------------------------------------

struct FeaturePeakReport {
    int row = 0;
    int col = 0;
    double score = 0.0;

    bool operator==(const FeaturePeakReport&) const = default;
};

struct SnapshotReport {
    std::string source;
    std::size_t train_size = 0, validation_size = 0, test_size = 0;
    std::string stop_reason;
    int epochs_run = 0;
    double final_mu = 0.0;
    std::vector<double> validation_accuracy; // aligned with PipelineReport::taus
    std::vector<double> test_accuracy;
    TrainTrace trace;
    int som_rows = 0, som_cols = 0;
    MatI hit_map;
    MatD plane_x, plane_y, plane_z;
    std::vector<FeaturePeakReport> feature_peaks;
};

struct PipelineReport {
    double tau = 0.10;
    std::vector<double> taus;
    double reference_accuracy = 0.67; // fixed comparison target, never asserted
    std::vector<double> mean_validation_accuracy; // aligned with taus
    std::vector<SnapshotReport> snapshots;
};

struct PipelineRun {
    PipelineReport report;
    std::vector<MlpModel> models; // one per snapshot, for .mlp export
};

namespace detail {

inline json mat_to_json(const MatD& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows; ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < m.cols; ++c) row.push_back(m.at(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json mat_to_json(const MatI& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows; ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < m.cols; ++c) row.push_back(m.at(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

template <typename T>
Mat<T> mat_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw ParseError("report: matrix must be a non-empty array");
    const std::size_t rows = j.size();
    const std::size_t cols = j.at(0).size();
    Mat<T> m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (j.at(r).size() != cols) throw ParseError("report: ragged matrix rows");
        for (std::size_t c = 0; c < cols; ++c) m.at(r, c) = j.at(r).at(c).get<T>();
    }
    return m;
}

inline json trace_to_json(const TrainTrace& t) {
    json records = json::array();
    for (const auto& r : t.records) {
        records.push_back({{"epoch", r.epoch},
                           {"mu", r.mu},
                           {"data_error", r.data_error},
                           {"weight_error", r.weight_error},
                           {"objective", r.objective},
                           {"alpha", r.alpha},
                           {"beta", r.beta},
                           {"gamma", r.gamma},
                           {"grad_norm", r.grad_norm},
                           {"validation_error", r.validation_error},
                           {"accepted", r.accepted}});
    }
    return records;
}

inline TrainTrace trace_from_json(const json& records, const std::string& stop_reason) {
    TrainTrace t;
    t.stop_reason = stop_reason_from_string(stop_reason);
    for (const auto& j : records) {
        EpochRecord r;
        r.epoch = j.at("epoch").get<int>();
        r.mu = j.at("mu").get<double>();
        r.data_error = j.at("data_error").get<double>();
        r.weight_error = j.at("weight_error").get<double>();
        r.objective = j.at("objective").get<double>();
        r.alpha = j.at("alpha").get<double>();
        r.beta = j.at("beta").get<double>();
        r.gamma = j.at("gamma").get<double>();
        r.grad_norm = j.at("grad_norm").get<double>();
        r.validation_error = j.at("validation_error").get<double>();
        r.accepted = j.at("accepted").get<bool>();
        t.records.push_back(r);
    }
    return t;
}

} // namespace detail

inline nlohmann::json report_to_json(const PipelineReport& rep) {
    using detail::json;
    json j;
    j["format"] = "flowmap-report";
    j["version"] = 1;
    j["tau"] = rep.tau;
    j["taus"] = rep.taus;
    j["reference_accuracy"] = rep.reference_accuracy;
    j["mean_validation_accuracy"] = rep.mean_validation_accuracy;
    json snaps = json::array();
    for (const auto& s : rep.snapshots) {
        json peaks = json::array();
        for (const auto& p : s.feature_peaks)
            peaks.push_back({{"row", p.row}, {"col", p.col}, {"score", p.score}});
        snaps.push_back({{"source", s.source},
                         {"train_size", s.train_size},
                         {"validation_size", s.validation_size},
                         {"test_size", s.test_size},
                         {"stop_reason", s.stop_reason},
                         {"epochs_run", s.epochs_run},
                         {"final_mu", s.final_mu},
                         {"validation_accuracy", s.validation_accuracy},
                         {"test_accuracy", s.test_accuracy},
                         {"trace", detail::trace_to_json(s.trace)},
                         {"som",
                          {{"rows", s.som_rows},
                           {"cols", s.som_cols},
                           {"hit_map", detail::mat_to_json(s.hit_map)},
                           {"plane_x", detail::mat_to_json(s.plane_x)},
                           {"plane_y", detail::mat_to_json(s.plane_y)},
                           {"plane_z", detail::mat_to_json(s.plane_z)},
                           {"feature_peaks", peaks}}}});
    }
    j["snapshots"] = std::move(snaps);
    return j;
}

inline void write_report(const PipelineReport& rep, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    out << report_to_json(rep).dump(2) << '\n';
    if (!out) throw ParseError("write failed for '" + path + "'");
}

inline PipelineReport read_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    try {
        PipelineReport rep;
        rep.tau = j.at("tau").get<double>();
        rep.taus = j.at("taus").get<std::vector<double>>();
        rep.reference_accuracy = j.at("reference_accuracy").get<double>();
        rep.mean_validation_accuracy = j.at("mean_validation_accuracy").get<std::vector<double>>();
        for (const auto& js : j.at("snapshots")) {
            SnapshotReport s;
            s.source = js.at("source").get<std::string>();
            s.train_size = js.at("train_size").get<std::size_t>();
            s.validation_size = js.at("validation_size").get<std::size_t>();
            s.test_size = js.at("test_size").get<std::size_t>();
            s.stop_reason = js.at("stop_reason").get<std::string>();
            s.epochs_run = js.at("epochs_run").get<int>();
            s.final_mu = js.at("final_mu").get<double>();
            s.validation_accuracy = js.at("validation_accuracy").get<std::vector<double>>();
            s.test_accuracy = js.at("test_accuracy").get<std::vector<double>>();
            s.trace = detail::trace_from_json(js.at("trace"), s.stop_reason);
            const auto& som = js.at("som");
            s.som_rows = som.at("rows").get<int>();
            s.som_cols = som.at("cols").get<int>();
            s.hit_map = detail::mat_from_json<long long>(som.at("hit_map"));
            s.plane_x = detail::mat_from_json<double>(som.at("plane_x"));
            s.plane_y = detail::mat_from_json<double>(som.at("plane_y"));
            s.plane_z = detail::mat_from_json<double>(som.at("plane_z"));
            for (const auto& jp : som.at("feature_peaks")) {
                FeaturePeakReport p;
                p.row = jp.at("row").get<int>();
                p.col = jp.at("col").get<int>();
                p.score = jp.at("score").get<double>();
                s.feature_peaks.push_back(p);
            }
            rep.snapshots.push_back(std::move(s));
        }
        return rep;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------
// Two-tier run
// ---------------------------------------------------------------------------

inline constexpr int kFeaturePeakCount = 5;

/// Run the full two-tier method for every configured snapshot: tier-1
/// training on the split samples, accuracy at the bracketing tolerances,
/// then a SOM over the tier-1 predictions plus the local Reynolds feature.
inline PipelineRun run_two_tier_full(const PipelineConfig& cfg) {
    if (cfg.snapshots.empty()) throw std::invalid_argument("pipeline: no snapshot sources");
    validate(cfg.mlp);

    std::vector<double> taus = {0.05, 0.10, 0.25};
    if (std::find(taus.begin(), taus.end(), cfg.tau) == taus.end()) taus.push_back(cfg.tau);
    std::sort(taus.begin(), taus.end());

    PipelineRun run;
    run.report.tau = cfg.tau;
    run.report.taus = taus;

    std::vector<double> acc_sum(taus.size(), 0.0);

    for (const auto& src : cfg.snapshots) {
        const std::string ctx = "pipeline: snapshot '" + src.label() + "'";
        std::string stage = "resolve";
        try {
            const FlowSnapshot snap = resolve_snapshot(src);
            stage = "feature";
            const ScalarGridField feature = local_re_feature(snap);

            stage = "dataset";
            SampleSet set = build_sample_set(snap, cfg.dataset.seed);
            if (cfg.dataset.keep_fraction < 1.0)
                set = filter_high_re(set, feature, cfg.dataset.keep_fraction);
            set = fit_and_apply_normalizer(set);

            stage = "train";
            TrainResult tr = train_mlp(set, cfg.mlp);

            stage = "evaluate";
            const auto predictions_for = [&](const std::vector<std::size_t>& idx) {
                std::pair<std::vector<std::vector<double>>, std::vector<std::vector<double>>> out;
                out.first.reserve(idx.size());
                out.second.reserve(idx.size());
                detail::ForwardScratch ws;
                for (std::size_t i : idx) {
                    detail::forward_into(tr.model, set.samples[i].input, ws);
                    out.first.push_back(ws.act.back());
                    out.second.emplace_back(set.samples[i].target.begin(), set.samples[i].target.end());
                }
                return out;
            };
            const auto [val_pred, val_tgt] = predictions_for(set.partition.validation);
            const auto [test_pred, test_tgt] = predictions_for(set.partition.test);

            SnapshotReport rep;
            rep.source = src.label();
            rep.train_size = set.partition.train.size();
            rep.validation_size = set.partition.validation.size();
            rep.test_size = set.partition.test.size();
            rep.stop_reason = to_string(tr.trace.stop_reason);
            rep.epochs_run = tr.trace.epochs_run();
            rep.final_mu = tr.trace.final_mu();
            for (std::size_t t = 0; t < taus.size(); ++t) {
                rep.validation_accuracy.push_back(accuracy_within_tol(val_pred, val_tgt, taus[t]));
                rep.test_accuracy.push_back(accuracy_within_tol(test_pred, test_tgt, taus[t]));
                acc_sum[t] += rep.validation_accuracy.back();
            }
            rep.trace = tr.trace;

            stage = "som";
            std::vector<std::vector<double>> som_data;
            std::vector<double> som_feature;
            som_data.reserve(set.samples.size());
            som_feature.reserve(set.samples.size());
            {
                detail::ForwardScratch ws;
                for (std::size_t i = 0; i < set.samples.size(); ++i) {
                    detail::forward_into(tr.model, set.samples[i].input, ws);
                    const auto& y = ws.act.back();
                    const double f = feature.values[set.node_index[i]];
                    som_data.push_back({y[0], y[1], y[2], f});
                    som_feature.push_back(f);
                }
            }
            SomLattice som = init_som(cfg.som_rows, cfg.som_cols, 4, som_data, cfg.som.seed);
            som = train_som(std::move(som), som_data, cfg.som);

            rep.som_rows = som.rows;
            rep.som_cols = som.cols;
            rep.hit_map = hit_map(som, som_data);
            rep.plane_x = component_plane(som, 0);
            rep.plane_y = component_plane(som, 1);
            rep.plane_z = component_plane(som, 2);
            for (const auto& p : feature_peaks(som, som_data, som_feature, kFeaturePeakCount))
                rep.feature_peaks.push_back({som.node_row(p.node), som.node_col(p.node), p.score});

            run.report.snapshots.push_back(std::move(rep));
            run.models.push_back(std::move(tr.model));
        } catch (const TrainingError& e) {
            throw TrainingError(ctx + ", stage " + stage + ": " + e.what(), e.trace);
        } catch (const ParseError& e) {
            throw ParseError(ctx + ", stage " + stage + ": " + e.what());
        } catch (const NumericError& e) {
            throw NumericError(ctx + ", stage " + stage + ": " + e.what());
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(ctx + ", stage " + stage + ": " + e.what());
        }
    }

    for (double s : acc_sum)
        run.report.mean_validation_accuracy.push_back(s / static_cast<double>(cfg.snapshots.size()));
    return run;
}

inline PipelineReport run_two_tier(const PipelineConfig& cfg) { return run_two_tier_full(cfg).report; }

/// Write report.json plus per-snapshot maps, CSVs and models. The first
/// snapshot uses the unsuffixed names (hitmap.pgm, plane_x.pgm, ...);
/// later snapshots get an _<index> suffix.
inline void write_pipeline_artifacts(const PipelineRun& run, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const auto file = [&](const std::string& stem, std::size_t i, const std::string& ext) {
        const std::string suffix = i == 0 ? "" : "_" + std::to_string(i);
        return (fs::path(out_dir) / (stem + suffix + ext)).string();
    };

    write_report(run.report, (fs::path(out_dir) / "report.json").string());
    for (std::size_t i = 0; i < run.report.snapshots.size(); ++i) {
        const auto& s = run.report.snapshots[i];
        render_pgm(to_double(s.hit_map), file("hitmap", i, ".pgm"));
        write_matrix_csv(s.hit_map, file("hitmap", i, ".csv"));
        render_pgm(s.plane_x, file("plane_x", i, ".pgm"));
        render_pgm(s.plane_y, file("plane_y", i, ".pgm"));
        render_pgm(s.plane_z, file("plane_z", i, ".pgm"));
        write_matrix_csv(s.plane_x, file("plane_x", i, ".csv"));
        write_matrix_csv(s.plane_y, file("plane_y", i, ".csv"));
        write_matrix_csv(s.plane_z, file("plane_z", i, ".csv"));
        save_mlp(run.models[i], file("model", i, ".mlp"));
    }
}

} // namespace flowmap
