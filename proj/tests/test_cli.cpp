// Drives the installed CLI binary end to end: exit codes, file outputs,
// and printed accuracy lines. The binary path arrives as argv[1].

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "flowmap/pipeline.hpp"

namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void check(bool ok, const std::string& what) {
    std::printf("%s  %s\n", ok ? "ok  " : "FAIL", what.c_str());
    if (!ok) ++g_failures;
}

int run_cmd(const std::string& cmd) {
    const int status = std::system(cmd.c_str());
    if (status == -1) return -1;
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    return -2;
}

std::string read_all(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: test_cli <flowmap-binary>\n");
        return 2;
    }
    const std::string bin = std::string("\"") + argv[1] + "\"";
    const fs::path dir = fs::temp_directory_path() / "flowmap_cli_test";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto p = [&](const char* name) { return (dir / name).string(); };

    check(run_cmd(bin + " > /dev/null 2>&1") == 1, "no subcommand exits 1");
    check(run_cmd(bin + " --help > /dev/null 2>&1") == 0, "--help exits 0");
    check(run_cmd(bin + " gen --kind bogus --out " + p("x.vfld") + " > /dev/null 2>&1") == 1,
          "bad generator kind exits 1");
    check(run_cmd(bin + " gen --kind tg --n 2 --out " + p("x.vfld") + " > /dev/null 2>&1") == 1,
          "grid too small exits 1");

    check(run_cmd(bin + " gen --kind tg --n 16 --re 80 --pr 0.7 --out " + p("tg.vfld")) == 0,
          "gen tg succeeds");
    {
        const auto snap = flowmap::load_snapshot(p("tg.vfld"));
        check(snap.grid.nx == 16 && snap.re == 80.0, "generated field parses with the right header");
    }
    check(run_cmd(bin + " gen --kind rand --n 8 --seed 3 --out " + p("rand.vfld")) == 0,
          "gen rand succeeds");

    check(run_cmd(bin + " eval --model " + p("missing.mlp") + " --field " + p("tg.vfld") +
                  " > /dev/null 2>&1") == 2,
          "missing model file exits 2");

    // render: CSV fixture through the CLI matches the library behaviour
    std::ofstream(p("m.csv")) << "0,1\n2,3\n";
    check(run_cmd(bin + " render --in " + p("m.csv") + " --out " + p("m.pgm")) == 0,
          "render succeeds");
    check(read_all(dir / "m.pgm") == "P2\n2 2\n255\n0 85\n170 255\n", "rendered PGM bytes");
    std::ofstream(p("bad.csv")) << "1,zz\n";
    check(run_cmd(bin + " render --in " + p("bad.csv") + " --out " + p("bad.pgm") +
                  " > /dev/null 2>&1") == 2,
          "malformed CSV exits 2");

    // pipeline on a small config
    std::ofstream(p("config.json")) << R"({
        "snapshots": [{"kind": "tg", "n": 16, "re": 80.0, "pr": 0.7}],
        "mlp": {"max_epochs": 10},
        "som": {"epochs": 5}
    })";
    const std::string out_dir = (dir / "out").string();
    check(run_cmd(bin + " pipeline --config " + p("config.json") + " --out-dir " + out_dir + " > " +
                  p("pipeline_stdout.txt")) == 0,
          "pipeline succeeds");
    check(fs::exists(dir / "out" / "report.json"), "pipeline wrote report.json");
    check(fs::exists(dir / "out" / "hitmap.pgm"), "pipeline wrote hitmap.pgm");
    check(fs::exists(dir / "out" / "plane_x.csv"), "pipeline wrote plane_x.csv");
    {
        const auto rep = flowmap::read_report((dir / "out" / "report.json").string());
        check(rep.snapshots.size() == 1 && rep.snapshots[0].train_size == 2867,
              "report carries the split sizes");
        const auto text = read_all(dir / "pipeline_stdout.txt");
        check(text.find("reference_accuracy 0.67") != std::string::npos,
              "pipeline prints the reference accuracy");
        check(text.find("mean_validation_accuracy tau=0.05") != std::string::npos,
              "pipeline prints per-tau accuracy");
    }
    check(run_cmd(bin + " pipeline --config " + p("nope.json") + " --out-dir " + out_dir +
                  " > /dev/null 2>&1") == 2,
          "missing config exits 2");

    // eval the trained model against the very field it was fitted on
    check(run_cmd(bin + " eval --model " + (dir / "out" / "model.mlp").string() + " --field " +
                  p("tg.vfld") + " --tau 0.25 > " + p("eval.txt")) == 0,
          "eval succeeds");
    const auto eval_out = read_all(dir / "eval.txt");
    check(eval_out.rfind("accuracy=", 0) == 0, "eval prints an accuracy line");

    if (g_failures == 0) std::printf("all CLI checks passed\n");
    return g_failures == 0 ? 0 : 1;
}
