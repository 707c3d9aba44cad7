#pragma once

#include "spulse/config.hpp"
#include "spulse/diagnostics.hpp"
#include "spulse/probe.hpp"
#include "spulse/snapshot.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace spulse {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitMonitor = 2 };

struct RunOptions {
    std::string out_dir;          // empty: the config's output.dir
    std::string trajectory_dir;   // scatter input; empty: out_dir
    unsigned jobs = 1;
    bool force = false;
};

struct VelocityFit {
    double v = 0.0;
    std::optional<double> ode_slope;          // log|residual| vs log t
    std::optional<double> phase_slope;        // d arg(gamma / reference) / d log t
    std::optional<double> phase_prediction;   // window mean of 3 |v|^{-1/2} |gamma|^2
    std::optional<double> phase_relerr;
    std::optional<double> modulus_drift;      // |d log|gamma| / d log10 t|
};

struct ScatterMetrics {
    std::optional<double> linf_slope;
    std::optional<double> ode_residual_slope;       // worst (largest) over the fit velocities
    std::optional<double> W_stability_slope;
    std::optional<double> phase_drift_relerr;       // worst over the fit velocities
    std::optional<double> modulus_drift_per_decade; // worst over the fit velocities
    std::optional<double> profile_remainder_slope;
    std::vector<VelocityFit> velocities;
};

struct ScatterResult {
    std::vector<ProbeRecord> records;            // sorted by (v, t)
    std::vector<std::pair<double, double>> W_stability; // (t, sup_v |W(t,v) - W(2t,v)|)
    std::vector<std::pair<double, double>> profile_remainder; // (t, t^{1/2} sup_v |u - profile|)
    double W_time = 0.0;                          // probe time the final-state table is taken at
    ScatterMetrics metrics;
};

/// Probe times are the cadence points t >= 1 strictly below T; snapshot 0 is
/// the phase reference. Throws MissingSnapshots naming the first absent time.
std::vector<double> required_probe_times(const ExperimentConfig& cfg);

ScatterResult scatter_analysis(const std::vector<Snapshot>& snapshots, const ExperimentConfig& cfg, unsigned jobs = 1);

/// Command entry points return an ExitCode. Diagnostics go to `err`; a final
/// JSON summary goes to `out`.
int cmd_simulate(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& out, std::ostream& err);
int cmd_scatter(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& out, std::ostream& err);
int cmd_appendix(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& out, std::ostream& err);

enum class InjectedFault { none, cutoff };

struct SelftestCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Identity suite over every module on small grids.
std::vector<SelftestCheck> run_selftest(InjectedFault fault = InjectedFault::none, unsigned jobs = 1);
int cmd_selftest(InjectedFault fault, const RunOptions& opts, std::ostream& out, std::ostream& err);

} // namespace spulse
