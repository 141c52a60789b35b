#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "flowmap/flowmap.hpp"

namespace {

int run_gen(const std::string& kind, int n, double re, double pr, std::uint64_t seed,
            double amplitude, double a, double b, double c, const std::string& out) {
    const double two_pi = 2.0 * std::numbers::pi;
    const flowmap::Grid3 grid(n, n, n, two_pi, two_pi, two_pi);
    flowmap::FlowSnapshot snap;
    if (kind == "tg") {
        snap = flowmap::taylor_green_snapshot(grid, re, pr);
    } else if (kind == "abc") {
        snap = flowmap::abc_snapshot(grid, a, b, c, re, pr);
    } else {
        snap = flowmap::random_solenoidal_snapshot(grid, seed, amplitude, re, pr);
    }
    flowmap::save_snapshot(snap, out);
    return 0;
}

int run_pipeline(const std::string& config_path, const std::string& out_dir) {
    const flowmap::PipelineConfig cfg = flowmap::load_pipeline_config(config_path);
    const flowmap::PipelineRun run = flowmap::run_two_tier_full(cfg);
    flowmap::write_pipeline_artifacts(run, out_dir);
    std::printf("wrote %s\n", (std::filesystem::path(out_dir) / "report.json").string().c_str());
    for (std::size_t t = 0; t < run.report.taus.size(); ++t) {
        std::printf("mean_validation_accuracy tau=%g %g\n", run.report.taus[t],
                    run.report.mean_validation_accuracy[t]);
    }
    std::printf("reference_accuracy %g\n", run.report.reference_accuracy);
    return 0;
}

int run_render(const std::string& in, const std::string& out) {
    flowmap::render_pgm(flowmap::read_matrix_csv(in), out);
    return 0;
}

int run_eval(const std::string& model_path, const std::string& field_path, double tau,
             std::uint64_t seed) {
    const flowmap::MlpModel model = flowmap::load_mlp(model_path);
    if (model.input_dim() != flowmap::kInputDim || model.output_dim() != flowmap::kTargetDim) {
        throw flowmap::ParseError("eval: model must map " + std::to_string(flowmap::kInputDim) +
                                  " inputs to " + std::to_string(flowmap::kTargetDim) + " outputs");
    }
    const flowmap::FlowSnapshot snap = flowmap::load_snapshot(field_path);
    flowmap::SampleSet set = flowmap::build_sample_set(snap, seed);
    set = flowmap::fit_and_apply_normalizer(set);

    std::vector<std::vector<double>> pred, tgt;
    pred.reserve(set.samples.size());
    tgt.reserve(set.samples.size());
    for (const auto& sm : set.samples) {
        pred.push_back(flowmap::forward(model, sm.input));
        tgt.emplace_back(sm.target.begin(), sm.target.end());
    }
    std::printf("accuracy=%g\n", flowmap::accuracy_within_tol(pred, tgt, tau));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"flowmap: two-tier velocity-field surrogate on periodic flow snapshots"};
    app.require_subcommand(1);

    std::string kind = "rand", out, config_path, out_dir, in_path, model_path, field_path;
    int n = 16;
    double re = 100.0, pr = 0.7, amplitude = 1.0, a = 1.0, b = 1.0, c = 1.0, tau = 0.1;
    std::uint64_t seed = 0, eval_seed = 1;

    auto* gen = app.add_subcommand("gen", "Generate a snapshot file (.vfld)");
    gen->add_option("--kind", kind, "Generator: tg | abc | rand")
        ->required()
        ->check(CLI::IsMember({"tg", "abc", "rand"}));
    gen->add_option("--n", n, "Nodes per axis (cube grid)")->default_val(16);
    gen->add_option("--re", re, "Reynolds number")->default_val(100.0);
    gen->add_option("--pr", pr, "Prandtl number")->default_val(0.7);
    gen->add_option("--seed", seed, "Seed (rand kind)")->default_val(0);
    gen->add_option("--amplitude", amplitude, "Field amplitude (rand kind)")->default_val(1.0);
    gen->add_option("--a", a, "ABC coefficient a")->default_val(1.0);
    gen->add_option("--b", b, "ABC coefficient b")->default_val(1.0);
    gen->add_option("--c", c, "ABC coefficient c")->default_val(1.0);
    gen->add_option("--out", out, "Output path")->required();

    auto* pipeline = app.add_subcommand("pipeline", "Run the two-tier pipeline from a JSON config");
    pipeline->add_option("--config", config_path, "Config JSON path")->required();
    pipeline->add_option("--out-dir", out_dir, "Output directory")->required();

    auto* render = app.add_subcommand("render", "Render a CSV matrix as an ASCII PGM");
    render->add_option("--in", in_path, "Input CSV path")->required();
    render->add_option("--out", out, "Output PGM path")->required();

    auto* eval = app.add_subcommand("eval", "Evaluate a saved model against a snapshot file");
    eval->add_option("--model", model_path, "Model file (.mlp)")->required();
    eval->add_option("--field", field_path, "Snapshot file (.vfld)")->required();
    eval->add_option("--tau", tau, "Relative accuracy tolerance")->default_val(0.1);
    eval->add_option("--seed", eval_seed, "Dataset split seed used when normalizing")->default_val(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1; // usage errors exit 1; --help exits 0
    }

    try {
        if (gen->parsed()) return run_gen(kind, n, re, pr, seed, amplitude, a, b, c, out);
        if (pipeline->parsed()) return run_pipeline(config_path, out_dir);
        if (render->parsed()) return run_render(in_path, out);
        if (eval->parsed()) return run_eval(model_path, field_path, tau, eval_seed);
    } catch (const flowmap::NumericError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const flowmap::ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "invalid arguments: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
