#pragma once

#include "spulse/grid.hpp"
#include "spulse/smooth.hpp"
#include "spulse/snapshot.hpp"
#include "spulse/spectral.hpp"

#include <optional>
#include <vector>

namespace spulse {

/// Which part of u is paired with the packet when estimating the amplitude.
/// `full` pairs u itself; `positive` pairs P^+ u, which removes the
/// negative-frequency leakage through the packet's spectral tail.
enum class Pairing { full, positive };

struct PacketParams {
    double delta_p = 1.0;
    double alpha = 0.04;
    std::vector<double> velocities = default_velocities();
    double cadence_ratio = 1.0905077326652577; // 2^{1/8}
    Pairing pairing = Pairing::positive;

    /// Support half-width of chi: 1 - 2^{-delta_p}.
    double chi_half_width() const;
    static std::vector<double> default_velocities(); // -2^{k/4}, k = -8..8
    void validate(double s) const;
};

/// min{2/45, 2/(2s+1), 2(s-4)/(3(s+1))}
double alpha_star(double s);

/// phi(t, x) = -2 sqrt(t|x|)
double phase(double t, double x);

bool in_window(double t, double v, double alpha);

/// Index range [first, last] of nodes where the packet may be nonzero.
struct PacketFootprint {
    std::size_t first = 0;
    std::size_t last = 0;
    double centre = 0.0;
    double half_width = 0.0;
};

/// Checks the packet preconditions and returns its node range.
/// Throws UnderResolved when dx > pi sqrt|v| / 4 and OutOfBox when the
/// support leaves the part of the box not watched by the wrap monitor.
PacketFootprint packet_footprint(double t, double v, const PacketParams& params, const Grid& g);

/// Psi_v(t, x) = |v|^{-3/4} chi((x - vt)/(t^{1/2}|v|^{3/4})) e^{i phi(t,x)}
Field packet(double t, double v, const PacketParams& params, const Grid& g);

/// sum_j w(x_j) conj(Psi_v(t, x_j)) dx
cplx pair_with_packet(const Field& w, double t, double v, const PacketParams& params);
cplx gamma(const Snapshot& s, double v, const PacketParams& params);

/// W = gamma exp(-3i |v|^{-1/2} |gamma|^2 log t)
cplx extract_W(cplx gamma, double t, double v);

/// r_i = dgamma/dt - 3i t^{-1} |v|^{-1/2} |gamma|^2 gamma, with the derivative
/// taken by a three-point difference in log t. Ends are left empty.
std::vector<std::optional<cplx>> ode_residual(const std::vector<double>& t, const std::vector<cplx>& gamma,
                                              double v);

/// W(v) on the probed velocity set, linear in v between samples.
class WSampler {
public:
    WSampler(std::vector<double> v, std::vector<cplx> W);
    struct Value {
        cplx W;
        bool extrapolated;
    };
    Value operator()(double v) const;
    bool empty() const { return v_.empty(); }

private:
    std::vector<double> v_; // ascending
    std::vector<cplx> W_;
};

struct ProfileValue {
    double value = 0.0;
    bool extrapolated = false;
};

/// (2/sqrt t) Re{W(x/t) exp(-2i sqrt(t|x|) + 3i sqrt(t/|x|)|W|^2 log t)} for x < 0, else 0.
ProfileValue asymptotic_profile(double t, double x, const WSampler& W);

/// Frequencies |xi| below sqrt(2t/L) have run past the seam by time t
/// (group position -t/xi^2) and come back as periodic images.
double image_frequency(double t, const Grid& g);

/// Drops |xi| <= image_frequency and tapers back to full weight at twice it.
/// On the line that band sits beyond |x| = L/2, so point values near x = vt
/// lose only its images.
SpectralField strip_periodic_images(const SpectralField& c, double t);

struct RayErrors {
    double err_u = 0.0;
    double err_ux = 0.0;
};

/// |u(t,vt) - 2 t^{-1/2} Re{e^{i phi} gamma}| and
/// |u_x(t,vt) - 2 t^{-1/2} |v|^{-1/2} Re{i e^{i phi} gamma}|, with u and u_x
/// interpolated band-limited at x = vt after strip_periodic_images.
RayErrors ray_errors(const Snapshot& s, double v, cplx gamma);
RayErrors ray_errors(const Snapshot& s, double v, const PacketParams& params);

struct ProbeRecord {
    double t = 0.0;
    double v = 0.0;
    double xi_v = 0.0;                 // |v|^{-1/2}
    double N_v = 0.0;                  // nearest scaled dyadic to xi_v
    cplx gamma{};                      // literal pairing with u
    cplx gamma_plus{};                 // pairing with P^+ u
    std::optional<cplx> gamma_linear;  // estimator applied to the free flow of u(0)
    cplx W{};                          // from the configured estimator
    std::optional<cplx> ode_residual;
    double err_u = 0.0;
    double err_ux = 0.0;
    bool in_window = false;

    cplx estimator(Pairing p) const { return p == Pairing::positive ? gamma_plus : gamma; }
};

/// Evaluates every velocity of `params` on one snapshot. `linear` is the free
/// evolution of the initial data to the same time, used as a phase reference.
/// `delta` sets the dyadic lattice used for N_v.
std::vector<ProbeRecord> probe_snapshot(const Snapshot& s, const PacketParams& params, double delta,
                                        const Field* linear = nullptr, unsigned jobs = 1);

/// Fills W and ode_residual across a table sorted by (v, t).
void finalize_records(std::vector<ProbeRecord>& records, const PacketParams& params);

} // namespace spulse
