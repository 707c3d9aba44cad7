#pragma once

#include "spulse/grid.hpp"
#include "spulse/snapshot.hpp"
#include "spulse/spectral.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace spulse {

enum class Integrator { ifrk4, etdrk4 };
enum class Dealias { pad2x, two_thirds };

struct SolverConfig {
    std::size_t n = std::size_t{1} << 15;
    double length = 800.0;
    double dt = 0.01;
    double t_final = 200.0;
    Integrator integrator = Integrator::ifrk4;
    Dealias dealias = Dealias::pad2x;
    double mean_tol = kDefaultMeanTol;
    int p = 3;
    bool nonlinear = true;
    /// Snapshots at 0, t0 * 2^{m h} for m = 0, 1, ... below t_final, and t_final.
    double cadence_t0 = 1.0;
    double cadence_h = 0.125;
    double sobolev_s = 4.5;
    /// Evaluate the d/dt ||u_x||^2 identity at every snapshot.
    bool h1_check = true;
    double wrap_threshold = 0.005;
    double step_growth_limit = 0.10;
    int max_halvings = 4;
    double blowup_factor = 2.0;

    Grid grid() const { return Grid(n, length); }
    void validate() const;
};

std::vector<double> snapshot_times(const SolverConfig& cfg);

/// d_x(u^p), dealiased, as a real field.
Field nonlinearity(const Field& u, int p, Dealias dealias = Dealias::pad2x);

/// Advances the raw half spectrum F_k = sum_j u_j e^{-2 pi i jk/n}, k = 0..n/2,
/// of a real field. Exponential tables are cached per step size.
class Stepper {
public:
    Stepper(const Grid& grid, int p, Integrator integrator, Dealias dealias, bool nonlinear,
            double growth_limit = 0.10);

    const Grid& grid() const { return grid_; }
    CVec to_half(const Field& u) const;
    Field to_field(const CVec& half) const;

    /// One step of size h (any sign). Throws StepRejected on non-finite values
    /// or if the H^1 norm grows by more than the growth limit.
    void step(CVec& half, double h);
    /// Dealiased i xi FFT(u^p) on the half spectrum.
    void nonlinear_term(const CVec& half, CVec& out);
    double h1_norm_squared(const CVec& half) const;
    double mean_coefficient(const CVec& half) const;

private:
    struct Tables {
        CVec e, e2;                // e^{lambda h}, e^{lambda h / 2}
        CVec q, f1, f2, f3;        // exponential time differencing weights
    };
    const Tables& tables(double h);
    void step_ifrk4(CVec& y, const Tables& tb, double h);
    void step_etdrk4(CVec& y, const Tables& tb);

    Grid grid_;
    int p_;
    Integrator integrator_;
    Dealias dealias_;
    bool nonlinear_;
    double growth_limit_;
    std::size_t half_;
    std::size_t padded_;
    RVec xi_;
    CVec lambda_;
    std::map<double, Tables> cache_;
    CVec k1_, k2_, k3_, k4_, tmp_, pad_hat_;
    RVec pad_real_;
};

struct Trajectory {
    SolverConfig config;
    std::vector<Snapshot> snapshots;
    std::string config_hash;
    std::string code_version;
};

using SnapshotMonitor = std::function<void(const Snapshot&)>;

/// Single step of the configured scheme from a snapshot.
Snapshot step(const Snapshot& s, double dt, const SolverConfig& cfg);

/// Integrates from cfg's start time to t_final, emitting snapshots at the
/// configured cadence to every monitor. Throws BlowUp, WrapAround or
/// MeanDrift when a monitor trips, StepRejected when halving cannot recover.
Trajectory evolve(const Field& u0, const SolverConfig& cfg, const std::vector<SnapshotMonitor>& monitors = {},
                  bool keep_snapshots = true);

} // namespace spulse
