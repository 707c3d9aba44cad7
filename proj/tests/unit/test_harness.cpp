#include "spulse/config.hpp"
#include "spulse/errors.hpp"
#include "spulse/harness.hpp"
#include "spulse/io.hpp"
#include "spulse/monitors.hpp"
#include "support.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace spulse;
using namespace testing_support;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("spulse_unit_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

ExperimentConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in, "test");
}

// Small box on which every default probe velocity fits for t < 4.
ExperimentConfig small_experiment(double eps) {
    ExperimentConfig cfg;
    cfg.solver.n = 512;
    cfg.solver.length = 128.0;
    cfg.solver.dt = 0.02;
    cfg.solver.t_final = 4.0;
    cfg.initial.epsilon = eps;
    cfg.decay_monitors = false;
    return cfg;
}

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string(SPULSE_CLI) + " " + args + " > " + (log / "stdout").string() + " 2> " +
                            (log / "stderr").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) { return read_text(p.string()); }

} // namespace

TEST_SUITE("cli_harness") {

TEST_CASE("config parses sections, comments and lists") {
    const ExperimentConfig c = parse(
        "# leading comment\n[solver]\nn = 1024 ; trailing\nL = 64\nintegrator = etdrk4\n"
        "[probe]\nvelocities = -1, -2, -0.70710678118654757, -1.4142135623730951\n[output]\nformats = json\n");
    CHECK(c.solver.n == 1024);
    CHECK(c.solver.length == 64.0);
    CHECK(c.solver.integrator == Integrator::etdrk4);
    CHECK(c.probe.velocities.size() == 4);
    CHECK(c.probe.velocities[1] == -2.0);
    CHECK(c.wants("json"));
    CHECK(!c.wants("csv"));
}

TEST_CASE("unknown keys and sections are named in the error") {
    try {
        parse("[solver]\nstep = 0.1\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("step") != std::string::npos);
    }
    CHECK_THROWS_AS(parse("[solvr]\nn = 8\n"), ConfigError);
    CHECK_THROWS_AS(parse("[solver]\nn = eight\n"), ConfigError);
    CHECK_THROWS_AS(parse("[solver]\nintegrator = euler\n"), ConfigError);
}

TEST_CASE("validation catches module preconditions at load time") {
    ExperimentConfig c;
    c.appendix.rho = 0.6;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = ExperimentConfig{};
    c.probe.alpha = 0.2;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = ExperimentConfig{};
    c.solver.n = 1000;
    CHECK_THROWS(c.validate());
    c = ExperimentConfig{};
    c.fits.ode_velocities = {-3.0};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    CHECK_NOTHROW(ExperimentConfig{}.validate());
}

TEST_CASE("canonical text round-trips and drives the hash") {
    ExperimentConfig c;
    c.solver.dt = 0.1 / 3.0;
    c.probe.velocities = {-1.0, -0.70710678118654757, -1.4142135623730951, -3.0};
    const std::string text = canonical_config(c);
    CHECK(canonical_config(parse(text)) == text);
    const std::string h = config_hash(c);
    CHECK(h.size() == 16);
    CHECK(h.find_first_not_of("0123456789abcdef") == std::string::npos);
    CHECK(config_hash(parse(text)) == h);
    c.solver.dt = 0.01;
    CHECK(config_hash(c) != h);
}

TEST_CASE("snapshot file round trip") {
    const fs::path dir = scratch("io");
    const Field u = gaussian_derivative(Grid(64, 16.0), 0.3);
    const std::string path = (dir / "u.spfld").string();
    write_field(path, u, 2.5);
    CHECK(fs::file_size(path) == 24 + 8 * 64);
    const std::string raw = read_text(path);
    CHECK(raw.substr(0, 8) == std::string("SPFLD01\0", 8));
    const StoredField f = read_field(path);
    CHECK(f.t == 2.5);
    REQUIRE(f.values.size() == 64);
    for (std::size_t j = 0; j < 64; ++j) CHECK(f.values[j] == u[j].real());
    write_text(path, "not a field");
    CHECK_THROWS(read_field(path));
}

TEST_CASE("CSV files carry the hash and a header") {
    const fs::path dir = scratch("csv");
    CsvWriter w((dir / "t.csv").string(), "0123456789abcdef", {"a", "b"});
    w.row({format_number(0.1), format_number(1.0 / 3.0)});
    CHECK_THROWS(w.row({"1"}));
    w.close();
    CHECK(slurp(dir / "t.csv") == "# config_hash: 0123456789abcdef\na,b\n0.10000000000000001,0.33333333333333331\n");
}

TEST_CASE("initial data") {
    ExperimentConfig c = small_experiment(0.1);
    const Field u = initial_data(c);
    CHECK(max_abs_diff(u, gaussian_derivative(c.solver.grid(), 0.1)) <= 1e-15);
    CHECK(has_zero_mean(u));
    const fs::path dir = scratch("initial");
    write_field((dir / "u0.spfld").string(), u, 0.0);
    c.initial.kind = InitialKind::file;
    c.initial.path = (dir / "u0.spfld").string();
    CHECK(max_abs_diff(initial_data(c), u) == 0.0);
    c.solver.n = 256;
    CHECK_THROWS_AS(initial_data(c), ConfigError);
}

TEST_CASE("decay monitors of a zero snapshot") {
    const Snapshot s = make_snapshot(Field::zeros(Grid(512, 128.0)), 2.0, 4.5, 3, kDefaultMeanTol);
    const DecayMonitors m = decay_monitors(s, build_cutoff(1.0));
    CHECK(m.hyp == 0.0);
    CHECK(m.ell == 0.0);
    CHECK(m.weighted == 0.0);
    const Snapshot early = make_snapshot(Field::zeros(Grid(512, 128.0)), 0.5, 4.5, 3, kDefaultMeanTol);
    CHECK_THROWS_AS(decay_monitors(early, build_cutoff(1.0)), InvalidArgument);
}

TEST_CASE("zero data: zero trajectory and degenerate fits") {
    const fs::path dir = scratch("zero");
    const ExperimentConfig cfg = small_experiment(0.0);
    RunOptions opts;
    opts.out_dir = dir.string();
    std::ostringstream out, err;
    REQUIRE(cmd_simulate(cfg, opts, out, err) == kExitOk);
    const auto summary = nlohmann::json::parse(out.str());
    CHECK(summary["l2_relative_drift"] == 0.0);
    std::istringstream norms(slurp(dir / "norms.csv"));
    std::string line;
    std::getline(norms, line);
    std::getline(norms, line);
    int rows = 0;
    while (std::getline(norms, line)) {
        ++rows;
        std::istringstream cells(line);
        std::string cell;
        std::getline(cells, cell, ',');
        for (int k = 0; k < 9; ++k) {
            std::getline(cells, cell, ',');
            CHECK(std::stod(cell) == 0.0);
        }
    }
    CHECK(rows == static_cast<int>(snapshot_times(cfg.solver).size()));

    std::ostringstream sout, serr;
    REQUIRE(cmd_scatter(cfg, opts, sout, serr) == kExitOk);
    const auto s = nlohmann::json::parse(sout.str());
    for (const char* key : {"linf_slope", "ode_residual_slope", "W_stability_slope", "phase_drift_relerr",
                            "profile_remainder_slope"}) {
        CHECK(s["degenerate"][key] == true);
        CHECK(s[key].is_null());
    }
    std::istringstream probe(slurp(dir / "probe.csv"));
    std::getline(probe, line);
    std::getline(probe, line);
    while (std::getline(probe, line)) {
        std::istringstream cells(line);
        std::string cell;
        for (int k = 0; k < 8; ++k) {
            std::getline(cells, cell, ',');
            if (k >= 4) CHECK(std::stod(cell) == 0.0); // gamma and gamma_plus, re and im
        }
    }
}

TEST_CASE("outputs are deterministic and scatter checks the config hash") {
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    const ExperimentConfig cfg = small_experiment(0.1);
    for (const fs::path& dir : {a, b}) {
        RunOptions opts;
        opts.out_dir = dir.string();
        std::ostringstream out, err;
        REQUIRE(cmd_simulate(cfg, opts, out, err) == kExitOk);
        REQUIRE(cmd_scatter(cfg, opts, out, err) == kExitOk);
    }
    for (const char* f : {"norms.csv", "manifest.json", "simulate_summary.json", "probe.csv", "W_table.csv",
                          "scatter_summary.json", "snapshots/u_0005.spfld"})
        CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);
    CHECK(slurp(a / "norms.csv").rfind("# config_hash: " + config_hash(cfg), 0) == 0);

    ExperimentConfig other = cfg;
    other.probe.alpha = 0.03;
    RunOptions opts;
    opts.out_dir = a.string();
    std::ostringstream out, err;
    CHECK(cmd_scatter(other, opts, out, err) == kExitUsage);
    CHECK(err.str().find("hash") != std::string::npos);
    opts.force = true;
    CHECK(cmd_scatter(other, opts, out, err) == kExitOk);
}

TEST_CASE("a cadence mismatch names the first absent time") {
    ExperimentConfig cfg = small_experiment(0.1);
    SolverConfig coarse = cfg.solver;
    coarse.cadence_h = 0.25;
    const Trajectory tr = evolve(initial_data(cfg), coarse);
    try {
        scatter_analysis(tr.snapshots, cfg);
        FAIL("expected MissingSnapshots");
    } catch (const MissingSnapshots& e) {
        CHECK(e.first_missing() == doctest::Approx(std::exp2(0.125)).epsilon(1e-15));
    }
}

TEST_CASE("command line exit codes") {
    const fs::path dir = scratch("cli");
    std::ofstream((dir / "bad.ini").string()) << "[solver]\nn = 512\nstepsize = 3\n";
    CHECK(run_cli("--config " + (dir / "bad.ini").string() + " --out " + dir.string() + " simulate", dir) == 1);
    CHECK(slurp(dir / "stderr").find("stepsize") != std::string::npos);

    CHECK(run_cli("--out " + dir.string() + " appendix --rho 0.6", dir) == 1);
    CHECK(run_cli("simulate --no-such-flag", dir) == 1);

    std::ofstream((dir / "wrap.ini").string()) << "[solver]\nn = 256\nL = 20\ndt = 0.05\nT = 100\n"
                                               << "[decomposition]\nmonitors = false\n";
    CHECK(run_cli("--config " + (dir / "wrap.ini").string() + " --out " + (dir / "wrap").string() + " simulate", dir) ==
          2);
    const auto summary = nlohmann::json::parse(slurp(dir / "stdout"));
    CHECK(summary["exit_code"] == 2);
    CHECK(summary["violation_time"].is_number());
}

TEST_CASE("selftest passes, is deterministic, and names an injected fault") {
    const fs::path dir = scratch("selftest");
    REQUIRE(run_cli("--out " + (dir / "a").string() + " selftest", dir) == 0);
    REQUIRE(run_cli("--out " + (dir / "b").string() + " selftest", dir) == 0);
    CHECK(slurp(dir / "a" / "selftest_report.txt") == slurp(dir / "b" / "selftest_report.txt"));
    CHECK(run_cli("selftest --inject-fault cutoff", dir) == 2);
    const std::string report = slurp(dir / "stdout");
    CHECK(report.find("FAIL LP cutoff sigma(0) = 1") != std::string::npos);
}

} // TEST_SUITE
