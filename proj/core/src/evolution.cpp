#include "spulse/evolution.hpp"

#include "spulse/errors.hpp"
#include "spulse/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#ifndef SPULSE_VERSION
#define SPULSE_VERSION "0.0.0"
#endif

namespace spulse {
namespace {

constexpr int kContourPoints = 32;

bool all_finite(const CVec& v) {
    for (const auto& c : v)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
}

std::size_t padded_size(std::size_t n, int p, Dealias d) {
    if (d == Dealias::two_thirds) return n;
    // (p+1)n/2 points make a degree-p product of modes |k| < n/2 alias-free.
    const std::size_t need = static_cast<std::size_t>(p + 1) * n / 2;
    return std::max(2 * n, need);
}

} // namespace

void SolverConfig::validate() const {
    (void)grid();
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("solver: dt must be positive");
    if (!(t_final >= 0.0) || !std::isfinite(t_final)) throw InvalidArgument("solver: T must be >= 0");
    if (p < 2 || p > 4) throw InvalidArgument("solver: p must be 2, 3 or 4");
    if (!(cadence_t0 > 0.0)) throw InvalidArgument("solver: cadence origin must be positive");
    if (!(cadence_h > 0.0)) throw InvalidArgument("solver: cadence step must be positive");
    if (!(mean_tol > 0.0)) throw InvalidArgument("solver: mean_tol must be positive");
    if (max_halvings < 0) throw InvalidArgument("solver: max_halvings must be >= 0");
}

std::vector<double> snapshot_times(const SolverConfig& cfg) {
    std::vector<double> times{0.0};
    if (cfg.t_final <= 0.0) return times;
    const double eps = 1e-12 * cfg.t_final;
    for (int m = 0;; ++m) {
        const double t = cfg.cadence_t0 * std::exp2(m * cfg.cadence_h);
        if (t >= cfg.t_final - eps) break;
        times.push_back(t);
    }
    times.push_back(cfg.t_final);
    return times;
}

Stepper::Stepper(const Grid& grid, int p, Integrator integrator, Dealias dealias, bool nonlinear,
                 double growth_limit)
    : grid_(grid), p_(p), integrator_(integrator), dealias_(dealias), nonlinear_(nonlinear),
      growth_limit_(growth_limit), half_(grid.n() / 2 + 1), padded_(padded_size(grid.n(), p, dealias)),
      xi_(half_), lambda_(half_), k1_(half_), k2_(half_), k3_(half_), k4_(half_), tmp_(half_),
      pad_hat_(padded_ / 2 + 1), pad_real_(padded_) {
    if (p < 2 || p > 4) throw InvalidArgument("Stepper: p must be 2, 3 or 4");
    for (std::size_t k = 0; k < half_; ++k) {
        xi_[k] = grid_.dxi() * static_cast<double>(k);
        lambda_[k] = (k == 0 || k == half_ - 1) ? cplx(0.0, 0.0) : cplx(0.0, -1.0 / xi_[k]);
    }
}

CVec Stepper::to_half(const Field& u) const {
    if (!u.is_real()) throw InvalidArgument("Stepper: field must be real");
    const std::size_t n = grid_.n();
    RVec re(n);
    for (std::size_t j = 0; j < n; ++j) re[j] = u[j].real();
    CVec out(half_);
    fft::r2c(re.data(), out.data(), n);
    out[half_ - 1] = 0.0;
    return out;
}

Field Stepper::to_field(const CVec& half) const {
    const std::size_t n = grid_.n();
    CVec work(half);
    RVec re(n);
    fft::c2r(work.data(), re.data(), n);
    CVec vals(n);
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) vals[j] = re[j] * inv;
    return Field(grid_, std::move(vals), Kind::real);
}

double Stepper::h1_norm_squared(const CVec& half) const {
    double s = 0.0;
    for (std::size_t k = 1; k + 1 < half_; ++k) s += 2.0 * (1.0 + xi_[k] * xi_[k]) * std::norm(half[k]);
    s += std::norm(half[0]);
    return s * grid_.dx() / static_cast<double>(grid_.n());
}

double Stepper::mean_coefficient(const CVec& half) const {
    return std::abs(half[0]) * grid_.dx() / std::sqrt(2.0 * std::numbers::pi);
}

void Stepper::nonlinear_term(const CVec& half, CVec& out) {
    const std::size_t n = grid_.n();
    const std::size_t keep = (dealias_ == Dealias::two_thirds) ? n / 3 + 1 : n / 2;
    std::fill(pad_hat_.begin(), pad_hat_.end(), cplx(0.0, 0.0));
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t k = 0; k < keep; ++k) pad_hat_[k] = half[k] * inv_n;
    fft::c2r(pad_hat_.data(), pad_real_.data(), padded_);
    switch (p_) {
    case 2:
        for (auto& v : pad_real_) v = v * v;
        break;
    case 3:
        for (auto& v : pad_real_) v = v * v * v;
        break;
    default:
        for (auto& v : pad_real_) {
            const double sq = v * v;
            v = sq * sq;
        }
        break;
    }
    fft::r2c(pad_real_.data(), pad_hat_.data(), padded_);
    const double back = static_cast<double>(n) / static_cast<double>(padded_);
    out[0] = 0.0;
    for (std::size_t k = 1; k < half_; ++k)
        out[k] = (k < keep) ? cplx(0.0, xi_[k] * back) * pad_hat_[k] : cplx(0.0, 0.0);
}

const Stepper::Tables& Stepper::tables(double h) {
    auto it = cache_.find(h);
    if (it != cache_.end()) return it->second;
    if (cache_.size() > 8) cache_.clear();

    Tables tb;
    tb.e.resize(half_);
    tb.e2.resize(half_);
    for (std::size_t k = 0; k < half_; ++k) {
        tb.e[k] = std::exp(lambda_[k] * h);
        tb.e2[k] = std::exp(lambda_[k] * (0.5 * h));
    }
    if (integrator_ == Integrator::etdrk4) {
        tb.q.resize(half_);
        tb.f1.resize(half_);
        tb.f2.resize(half_);
        tb.f3.resize(half_);
        // Contour averages around lambda h avoid the cancellation of the
        // closed forms near lambda h = 0.
        for (std::size_t k = 0; k < half_; ++k) {
            cplx q = 0.0, f1 = 0.0, f2 = 0.0, f3 = 0.0;
            for (int j = 0; j < kContourPoints; ++j) {
                const cplx z = lambda_[k] * h + std::polar(1.0, 2.0 * std::numbers::pi * (j + 0.5) / kContourPoints);
                const cplx ez = std::exp(z);
                const cplx z3 = z * z * z;
                q += (std::exp(0.5 * z) - 1.0) / z;
                f1 += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
                f2 += (2.0 + z + ez * (z - 2.0)) / z3;
                f3 += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
            }
            const double w = h / kContourPoints;
            tb.q[k] = q * w;
            tb.f1[k] = f1 * w;
            tb.f2[k] = f2 * w;
            tb.f3[k] = f3 * w;
        }
    }
    return cache_.emplace(h, std::move(tb)).first->second;
}

void Stepper::step_ifrk4(CVec& y, const Tables& tb, double h) {
    const std::size_t m = half_;
    nonlinear_term(y, k1_);
    for (std::size_t k = 0; k < m; ++k) {
        k1_[k] *= h;
        tmp_[k] = tb.e2[k] * (y[k] + 0.5 * k1_[k]);
    }
    nonlinear_term(tmp_, k2_);
    for (std::size_t k = 0; k < m; ++k) {
        k2_[k] *= h;
        tmp_[k] = tb.e2[k] * y[k] + 0.5 * k2_[k];
    }
    nonlinear_term(tmp_, k3_);
    for (std::size_t k = 0; k < m; ++k) {
        k3_[k] *= h;
        tmp_[k] = tb.e[k] * y[k] + tb.e2[k] * k3_[k];
    }
    nonlinear_term(tmp_, k4_);
    for (std::size_t k = 0; k < m; ++k) {
        k4_[k] *= h;
        y[k] = tb.e[k] * y[k] + (tb.e[k] * k1_[k] + 2.0 * tb.e2[k] * (k2_[k] + k3_[k]) + k4_[k]) / 6.0;
    }
}

void Stepper::step_etdrk4(CVec& y, const Tables& tb) {
    const std::size_t m = half_;
    // k1_ = N(y), k2_ = N(a), k3_ = N(b), k4_ = N(c); a is kept in tmp_ until c is formed.
    CVec a(m);
    nonlinear_term(y, k1_);
    for (std::size_t k = 0; k < m; ++k) a[k] = tb.e2[k] * y[k] + tb.q[k] * k1_[k];
    nonlinear_term(a, k2_);
    for (std::size_t k = 0; k < m; ++k) tmp_[k] = tb.e2[k] * y[k] + tb.q[k] * k2_[k];
    nonlinear_term(tmp_, k3_);
    for (std::size_t k = 0; k < m; ++k) tmp_[k] = tb.e2[k] * a[k] + tb.q[k] * (2.0 * k3_[k] - k1_[k]);
    nonlinear_term(tmp_, k4_);
    for (std::size_t k = 0; k < m; ++k)
        y[k] = tb.e[k] * y[k] + tb.f1[k] * k1_[k] + 2.0 * tb.f2[k] * (k2_[k] + k3_[k]) + tb.f3[k] * k4_[k];
}

void Stepper::step(CVec& half, double h) {
    if (h == 0.0) return;
    const Tables& tb = tables(h);
    if (!nonlinear_) {
        for (std::size_t k = 0; k < half_; ++k) half[k] *= tb.e[k];
        return;
    }
    const double before = h1_norm_squared(half);
    if (integrator_ == Integrator::ifrk4)
        step_ifrk4(half, tb, h);
    else
        step_etdrk4(half, tb);
    if (!all_finite(half)) throw StepRejected("non-finite value after step");
    const double after = h1_norm_squared(half);
    const double limit = (1.0 + growth_limit_) * (1.0 + growth_limit_);
    if (before > 0.0 && after > limit * before)
        throw StepRejected("H^1 norm grew by more than " + std::to_string(100.0 * growth_limit_) + "% in one step");
}

Field nonlinearity(const Field& u, int p, Dealias dealias) {
    Stepper st(u.grid(), p, Integrator::ifrk4, dealias, true);
    const CVec half = st.to_half(u);
    CVec out(half.size());
    st.nonlinear_term(half, out);
    return st.to_field(out);
}

namespace {

double h1_seminorm_squared(const Stepper& st, const CVec& half) {
    const Grid& g = st.grid();
    double s = 0.0;
    for (std::size_t k = 1; k + 1 < half.size(); ++k) {
        const double xi = g.dxi() * static_cast<double>(k);
        s += 2.0 * xi * xi * std::norm(half[k]);
    }
    return s * g.dx() / static_cast<double>(g.n());
}

// Five-point centred difference of ||u_x||^2 along the discrete flow.
H1RateCheck h1_rate(Stepper& st, const CVec& y, const Snapshot& snap, double h) {
    double e[4];
    const double offsets[4] = {-2.0, -1.0, 1.0, 2.0};
    for (int i = 0; i < 4; ++i) {
        CVec w(y);
        const double sign = offsets[i] > 0 ? 1.0 : -1.0;
        for (int r = 0; r < static_cast<int>(std::abs(offsets[i])); ++r) st.step(w, sign * h);
        e[i] = h1_seminorm_squared(st, w);
    }
    const double fd = (e[0] - 8.0 * e[1] + 8.0 * e[2] - e[3]) / (12.0 * h);
    double quad = 0.0, scale = 0.0;
    const std::size_t n = snap.u.size();
    for (std::size_t j = 0; j < n; ++j) {
        const double u = snap.u[j].real();
        const double ux = snap.ux[j].real();
        quad += u * ux * ux * ux;
        scale += std::abs(u * ux * ux * ux);
    }
    const double dx = snap.u.grid().dx();
    quad *= 6.0 * dx;
    scale *= 6.0 * dx;
    H1RateCheck out;
    out.fd_rate = fd;
    out.quadrature_rate = quad;
    out.rel_error = scale > 0.0 ? std::abs(fd - quad) / scale : std::abs(fd - quad);
    return out;
}

} // namespace

Snapshot step(const Snapshot& s, double dt, const SolverConfig& cfg) {
    if (dt == 0.0) return s;
    Stepper st(s.u.grid(), cfg.p, cfg.integrator, cfg.dealias, cfg.nonlinear, cfg.step_growth_limit);
    CVec y = st.to_half(s.u);
    st.step(y, dt);
    return make_snapshot(st.to_field(y), s.t + dt, cfg.sobolev_s, cfg.p, cfg.mean_tol);
}

Trajectory evolve(const Field& u0, const SolverConfig& cfg, const std::vector<SnapshotMonitor>& monitors,
                  bool keep_snapshots) {
    cfg.validate();
    const Grid g = cfg.grid();
    if (!(u0.grid() == g)) throw InvalidArgument("evolve: initial field grid does not match the solver grid");
    if (!u0.is_real()) throw InvalidArgument("evolve: initial field must be real");
    require_zero_mean(u0, cfg.mean_tol, "evolve");

    Stepper st(g, cfg.p, cfg.integrator, cfg.dealias, cfg.nonlinear, cfg.step_growth_limit);
    const std::vector<double> times = snapshot_times(cfg);
    CVec y = st.to_half(u0);
    const double h1_initial = st.h1_norm_squared(y);

    Trajectory traj;
    traj.config = cfg;
    traj.code_version = SPULSE_VERSION;

    auto emit = [&](double t) {
        Snapshot snap = make_snapshot(st.to_field(y), t, cfg.sobolev_s, cfg.p, cfg.mean_tol);
        if (cfg.h1_check && cfg.nonlinear && cfg.p == 3) snap.h1 = h1_rate(st, y, snap, cfg.dt);
        const double l2 = snap.norms.l2;
        if (st.mean_coefficient(y) > cfg.mean_tol * std::max(l2, 1e-300) && l2 > 0.0)
            throw MeanDrift("mean drifted beyond tolerance at t = " + std::to_string(t), t);
        for (const auto& m : monitors) m(snap);
        if (snap.norms.wrapfrac >= cfg.wrap_threshold)
            throw WrapAround("wrap-around mass fraction " + std::to_string(snap.norms.wrapfrac) + " at t = " +
                                 std::to_string(t),
                             t);
        if (h1_initial > 0.0 && st.h1_norm_squared(y) > cfg.blowup_factor * cfg.blowup_factor * h1_initial)
            throw BlowUp("H^1 norm more than doubled by t = " + std::to_string(t), t);
        if (keep_snapshots) traj.snapshots.push_back(std::move(snap));
    };

    emit(times.front());
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double span = times[i] - times[i - 1];
        long steps = std::max(1L, static_cast<long>(std::ceil(span / cfg.dt - 1e-9)));
        for (int attempt = 0;; ++attempt) {
            CVec trial(y);
            try {
                const double h = span / static_cast<double>(steps);
                for (long k = 0; k < steps; ++k) st.step(trial, h);
                y = std::move(trial);
                break;
            } catch (const StepRejected&) {
                if (attempt >= cfg.max_halvings) throw;
                steps *= 2;
            }
        }
        emit(times[i]);
    }
    return traj;
}

} // namespace spulse
