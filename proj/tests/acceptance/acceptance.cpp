// Desk-scale acceptance run. Prints one PASS/FAIL line per criterion and exits
// with the number of failed criteria.
#include "spulse/appendix.hpp"
#include "spulse/config.hpp"
#include "spulse/diagnostics.hpp"
#include "spulse/evolution.hpp"
#include "spulse/harness.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

using namespace spulse;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace tol {
constexpr double l2_drift = 1e-8;
constexpr double mean_drift = 1e-10;
constexpr double h1_identity = 1e-3;
constexpr double linf_slope_lo = -0.6;
constexpr double linf_slope_hi = -0.4;
constexpr double xs_exponent = 0.1;
constexpr double ode_slope = -1.0;
constexpr double phase_relerr = 0.10;
constexpr double modulus_drift = 0.05;
constexpr double W_slope = -0.05;
constexpr double profile_slope = -0.05;
constexpr double appendix_exp_lo = 0.4;
constexpr double appendix_exp_hi = 0.6;
constexpr double appendix_corrected = 0.05;
constexpr double appendix_seconds = 10.0;
constexpr double selftest_seconds = 30.0;
constexpr double dt_ratio_lo = 10.0;
constexpr double dt_ratio_hi = 22.0;
constexpr double n_doubling = 1e-8;
} // namespace tol

namespace {

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail) {
    if (!ok) ++failures;
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << " " << name << ": " << detail << std::endl;
}

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(4);
    s << v;
    return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json read_json(const fs::path& p) {
    std::ifstream in(p);
    return json::parse(in);
}

double num(const json& j, const char* key) {
    return j.at(key).is_null() ? std::nan("") : j.at(key).get<double>();
}

// Columns of norms.csv by header name; the first line is the hash comment.
std::map<std::string, std::vector<double>> read_norms(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    std::vector<std::string> names;
    std::stringstream header(line);
    for (std::string cell; std::getline(header, cell, ',');) names.push_back(cell);
    std::map<std::string, std::vector<double>> cols;
    while (std::getline(in, line)) {
        std::stringstream row(line);
        std::string cell;
        for (std::size_t k = 0; k < names.size() && std::getline(row, cell, ','); ++k)
            if (!cell.empty()) cols[names[k]].push_back(std::stod(cell));
    }
    return cols;
}

// Criteria 1-8 run on a box wide enough that the default box's wrap-around
// monitor would otherwise stop the run near t = 108.
ExperimentConfig reference_config(const fs::path& dir) {
    ExperimentConfig cfg;
    cfg.solver.n = std::size_t{1} << 16;
    cfg.solver.length = 12800.0;
    cfg.solver.dt = 0.01;
    cfg.output.dir = dir.string();
    return cfg;
}

void trajectory_criteria(const fs::path& dir, unsigned jobs) {
    const ExperimentConfig cfg = reference_config(dir);
    RunOptions opts;
    opts.out_dir = dir.string();
    opts.jobs = jobs;
    opts.force = true;
    std::ostringstream out;
    const auto t0 = std::chrono::steady_clock::now();
    const int sim = cmd_simulate(cfg, opts, out, std::cerr);
    std::cout << "# simulate n = " << cfg.solver.n << " L = " << cfg.solver.length << " exit " << sim << " in "
              << fmt(seconds_since(t0)) << " s" << std::endl;
    if (sim != kExitOk) {
        for (int id = 1; id <= 8; ++id) report(id, "trajectory", false, "simulate exited " + std::to_string(sim));
        return;
    }
    const json sim_summary = read_json(dir / "simulate_summary.json");
    const double l2 = num(sim_summary, "l2_relative_drift");
    const double mean = num(sim_summary, "max_mean_ratio");
    report(1, "conservation", l2 <= tol::l2_drift && mean <= tol::mean_drift,
           "l2 drift " + fmt(l2) + " (<= 1e-8), mean ratio " + fmt(mean) + " (<= 1e-10)");
    const double h1 = num(sim_summary, "max_h1_rel_error");
    report(2, "H1 identity", h1 <= tol::h1_identity, "max rel error " + fmt(h1) + " (<= 1e-3)");

    const auto norms = read_norms(dir / "norms.csv");
    const FitResult xs = decay_fit(norms.at("t"), norms.at("xs"), cfg.fits.xs.first, cfg.fits.xs.second);

    const auto t1 = std::chrono::steady_clock::now();
    const int sc = cmd_scatter(cfg, opts, out, std::cerr);
    std::cout << "# scatter exit " << sc << " in " << fmt(seconds_since(t1)) << " s" << std::endl;
    if (sc != kExitOk) {
        report(4, "X^s growth", xs.slope <= tol::xs_exponent, "exponent " + fmt(xs.slope) + " (<= 0.1)");
        for (int id : {3, 5, 6, 7, 8}) report(id, "scatter", false, "scatter exited " + std::to_string(sc));
        return;
    }
    const json m = read_json(dir / "scatter_summary.json");
    const double linf = num(m, "linf_slope");
    report(3, "decay law", linf >= tol::linf_slope_lo && linf <= tol::linf_slope_hi,
           "slope " + fmt(linf) + " (in [-0.6, -0.4])");
    report(4, "X^s growth", xs.slope <= tol::xs_exponent, "exponent " + fmt(xs.slope) + " (<= 0.1)");
    const double ode = num(m, "ode_residual_slope");
    report(5, "limit ODE", ode <= tol::ode_slope, "worst slope " + fmt(ode) + " (<= -1.0)");
    const double phase = num(m, "phase_drift_relerr");
    const double modulus = num(m, "modulus_drift_per_decade");
    report(6, "phase drift", phase <= tol::phase_relerr && modulus <= tol::modulus_drift,
           "worst phase relerr " + fmt(phase) + " (<= 0.10), modulus drift " + fmt(modulus) + " per decade (<= 0.05)");
    const double W = num(m, "W_stability_slope");
    report(7, "final state", W <= tol::W_slope, "slope " + fmt(W) + " (<= -0.05)");
    const double prof = num(m, "profile_remainder_slope");
    report(8, "profile remainder", prof <= tol::profile_slope, "slope " + fmt(prof) + " (<= -0.05)");
}

void appendix_criterion(unsigned jobs) {
    const auto t0 = std::chrono::steady_clock::now();
    const ScanResult r = failure_scan(0.25, 32.0, 1024.0, 4096, jobs);
    const double secs = seconds_since(t0);
    const bool ok = r.original_exponent >= tol::appendix_exp_lo && r.original_exponent <= tol::appendix_exp_hi &&
                    r.crossing_N.has_value() && r.corrected_exponent <= tol::appendix_corrected &&
                    secs <= tol::appendix_seconds;
    report(9, "appendix failure", ok,
           "original exponent " + fmt(r.original_exponent) + " (in [0.4, 0.6]), crossing N " +
               (r.crossing_N ? fmt(*r.crossing_N) : std::string("none")) + ", corrected exponent " +
               fmt(r.corrected_exponent) + " (<= 0.05), " + fmt(secs) + " s (<= 10)");
}

void selftest_criterion(unsigned jobs) {
    RunOptions opts;
    opts.jobs = jobs;
    std::ostringstream out, err;
    const auto t0 = std::chrono::steady_clock::now();
    const int code = cmd_selftest(InjectedFault::none, opts, out, err);
    const double secs = seconds_since(t0);
    report(10, "identity suite", code == kExitOk && secs <= tol::selftest_seconds,
           "exit " + std::to_string(code) + ", " + fmt(secs) + " s (<= 30)");
}

Field solve_to_one(std::size_t n, double dt) {
    ExperimentConfig cfg;
    cfg.solver.n = n;
    cfg.solver.dt = dt;
    cfg.solver.t_final = 1.0;
    cfg.solver.h1_check = false;
    return evolve(initial_data(cfg), cfg.solver).snapshots.back().u;
}

void convergence_criterion() {
    const std::size_t n = std::size_t{1} << 15;
    const Field a = solve_to_one(n, 0.01);
    const Field b = solve_to_one(n, 0.005);
    const Field c = solve_to_one(n, 0.0025);
    const double ratio = l2_norm(subtract(a, b)) / l2_norm(subtract(b, c));

    // The wrap fraction is an outer-box mass monitor, not a norm; its 5% boundary
    // cuts a different node set when n doubles.
    const NormRecord lo = compute_norms(a, 1.0, 4.5);
    const NormRecord hi = compute_norms(solve_to_one(2 * n, 0.01), 1.0, 4.5);
    const std::vector<std::pair<const char*, std::pair<double, double>>> pairs{
        {"l2", {lo.l2, hi.l2}},         {"hs", {lo.hs, hi.hs}},       {"hm1", {lo.hm1, hi.hm1}},
        {"jdx_l2", {lo.jdx_l2, hi.jdx_l2}}, {"xs", {lo.xs, hi.xs}},   {"linf", {lo.linf, hi.linf}},
        {"ux_linf", {lo.ux_linf, hi.ux_linf}}, {"su_l2", {lo.su_l2, hi.su_l2}}};
    double worst = 0.0;
    std::string worst_name;
    for (const auto& [name, v] : pairs) {
        const double d = std::abs(v.first - v.second) / std::abs(v.second);
        if (d >= worst) {
            worst = d;
            worst_name = name;
        }
    }
    report(11, "self-convergence", ratio >= tol::dt_ratio_lo && ratio <= tol::dt_ratio_hi && worst <= tol::n_doubling,
           "dt-halving ratio " + fmt(ratio) + " (in [10, 22]), n-doubling worst " + fmt(worst) + " on " + worst_name +
               " (<= 1e-8)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spulse acceptance run"};
    std::string work = (fs::temp_directory_path() / "spulse_acceptance").string();
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
    bool quick = false;
    app.add_option("--work", work, "scratch directory for the reference trajectory");
    app.add_option("--jobs", jobs, "worker threads");
    app.add_flag("--quick", quick, "skip the reference trajectory (criteria 1-8)");
    CLI11_PARSE(app, argc, argv);

    const auto t0 = std::chrono::steady_clock::now();
    try {
        if (!quick) {
            fs::remove_all(work);
            fs::create_directories(work);
            trajectory_criteria(work, jobs);
        }
        appendix_criterion(jobs);
        selftest_criterion(jobs);
        convergence_criterion();
    } catch (const std::exception& e) {
        std::cout << "FAIL acceptance aborted: " << e.what() << std::endl;
        return 100;
    }
    std::cout << "# " << failures << " criteria failed, total " << fmt(seconds_since(t0)) << " s" << std::endl;
    return failures;
}
