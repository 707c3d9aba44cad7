#include "spulse/config.hpp"
#include "spulse/errors.hpp"
#include "spulse/harness.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <thread>

int main(int argc, char** argv) {
    CLI::App app{"Short-pulse equation pseudospectral toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    spulse::RunOptions opts;
    opts.jobs = std::max(1u, std::thread::hardware_concurrency());
    app.add_option("--config", config_path, "INI experiment configuration (defaults apply when omitted)");
    app.add_option("--out", opts.out_dir, "Output directory (overrides output.dir)");
    app.add_option("--jobs", opts.jobs, "Worker threads for probes, bands and scan cases")->check(CLI::PositiveNumber);
    app.add_flag("--force", opts.force, "Accept a trajectory whose config hash differs");

    auto* simulate = app.add_subcommand("simulate", "Evolve the initial data and write snapshots and norms");
    auto* scatter = app.add_subcommand("scatter", "Probe a stored trajectory with wave packets");
    scatter->add_option("--trajectory", opts.trajectory_dir, "Trajectory directory (defaults to the output directory)");
    auto* appendix = app.add_subcommand("appendix", "Scan the Fourier-side counterexample family");
    std::optional<double> rho, n_min, n_max;
    appendix->add_option("--rho", rho, "Interpolation exponent in (0, 1/2)");
    appendix->add_option("--n-min", n_min, "Smallest frequency scale");
    appendix->add_option("--n-max", n_max, "Largest frequency scale");
    auto* selftest = app.add_subcommand("selftest", "Run the identity suite");
    std::string fault = "none";
    selftest->add_option("--inject-fault", fault, "Corrupt one invariant on purpose (test mode)")
        ->check(CLI::IsMember({"none", "cutoff"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return spulse::kExitUsage;
    }

    try {
        if (*selftest)
            return spulse::cmd_selftest(fault == "cutoff" ? spulse::InjectedFault::cutoff : spulse::InjectedFault::none,
                                        opts, std::cout, std::cerr);

        spulse::ExperimentConfig cfg = config_path.empty() ? spulse::ExperimentConfig{} : spulse::load_config(config_path);
        if (*appendix) {
            if (rho) cfg.appendix.rho = *rho;
            if (n_min) cfg.appendix.N_min = *n_min;
            if (n_max) cfg.appendix.N_max = *n_max;
            return spulse::cmd_appendix(cfg, opts, std::cout, std::cerr);
        }
        cfg.validate();
        if (*simulate) return spulse::cmd_simulate(cfg, opts, std::cout, std::cerr);
        if (*scatter) return spulse::cmd_scatter(cfg, opts, std::cout, std::cerr);
    } catch (const spulse::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return spulse::kExitUsage;
    } catch (const spulse::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return spulse::kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return spulse::kExitUsage;
    }
    return spulse::kExitUsage;
}
