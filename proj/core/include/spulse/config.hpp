#pragma once

#include "spulse/evolution.hpp"
#include "spulse/probe.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace spulse {

enum class InitialKind { gaussian_derivative, file };
enum class PhaseReference { linear, none };

struct InitialConfig {
    InitialKind kind = InitialKind::gaussian_derivative;
    double epsilon = 0.1;
    double width = 1.0;
    std::string path;   // SPFLD01 file when kind = file
};

using FitWindow = std::pair<double, double>;

struct FitConfig {
    FitWindow linf{10.0, 200.0};
    FitWindow xs{1.0, 200.0};
    FitWindow ode{20.0, 200.0};
    FitWindow profile{20.0, 200.0};
    /// Rays whose gamma series feed the limit-ODE and phase-drift fits.
    std::vector<double> ode_velocities{-1.0, -0.70710678118654757, -1.4142135623730951};
};

struct AppendixConfig {
    double rho = 0.25;
    double N_min = 32.0;
    double N_max = 1024.0;
    int quad_points = 4096;
};

struct OutputConfig {
    std::string dir = "out";
    std::vector<std::string> formats{"csv", "json"};
    bool snapshots = true;
};

struct ExperimentConfig {
    SolverConfig solver;
    InitialConfig initial;
    double delta = 1.0;              // Littlewood-Paley lattice spacing
    bool decay_monitors = true;      // per-snapshot hyperbolic/elliptic monitors in simulate
    PacketParams probe;
    PhaseReference phase_reference = PhaseReference::linear;
    FitConfig fits;
    AppendixConfig appendix;
    OutputConfig output;

    /// Checks every module precondition that does not need the data.
    void validate() const;
    bool wants(const std::string& format) const;
};

/// INI subset: [section] headers, key = value lines, '#' or ';' comments.
/// Unknown sections or keys throw ConfigError naming them.
ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path);

/// Every field in a fixed order with 17 significant digits; parse_config of
/// the result reproduces the config.
std::string canonical_config(const ExperimentConfig& cfg);
/// 64-bit FNV-1a of the canonical text, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

Field initial_data(const ExperimentConfig& cfg);

} // namespace spulse
