#include "spulse/probe.hpp"

#include "spulse/diagnostics.hpp"
#include "spulse/errors.hpp"
#include "spulse/lp.hpp"
#include "spulse/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>
#include <string>

namespace spulse {

double PacketParams::chi_half_width() const { return 1.0 - std::exp2(-delta_p); }

std::vector<double> PacketParams::default_velocities() {
    std::vector<double> v;
    for (int k = -8; k <= 8; ++k) v.push_back(-std::exp2(k / 4.0));
    return v;
}

double alpha_star(double s) {
    return std::min({2.0 / 45.0, 2.0 / (2.0 * s + 1.0), 2.0 * (s - 4.0) / (3.0 * (s + 1.0))});
}

void PacketParams::validate(double s) const {
    if (!(delta_p > 0.0)) throw InvalidArgument("probe: delta_p must be positive");
    if (!(cadence_ratio > 1.0)) throw InvalidArgument("probe: cadence_ratio must exceed 1");
    if (velocities.empty()) throw InvalidArgument("probe: velocity set is empty");
    for (double v : velocities)
        if (!(v < 0.0)) throw InvalidArgument("probe: velocities must be negative");
    const double cap = alpha_star(s);
    if (!(alpha > 0.0) || !(alpha < cap))
        throw InvalidArgument("probe: alpha must lie in (0, " + std::to_string(cap) + ") for s = " + std::to_string(s));
}

double phase(double t, double x) { return -2.0 * std::sqrt(t * std::abs(x)); }

bool in_window(double t, double v, double alpha) {
    const double speed = -v;
    return speed >= std::pow(t, -alpha) && speed <= std::pow(t, alpha);
}

PacketFootprint packet_footprint(double t, double v, const PacketParams& params, const Grid& g) {
    if (!(t >= 1.0)) throw InvalidArgument("packet: requires t >= 1");
    if (!(v < 0.0)) throw InvalidArgument("packet: requires v < 0");
    const double speed = -v;
    if (g.dx() > std::numbers::pi * std::sqrt(speed) / 4.0)
        throw UnderResolved("packet at v = " + std::to_string(v) + " needs dx <= " +
                            std::to_string(std::numbers::pi * std::sqrt(speed) / 4.0));
    PacketFootprint fp;
    fp.centre = v * t;
    fp.half_width = params.chi_half_width() * std::sqrt(t) * std::pow(speed, 0.75);
    const double limit = (1.0 - kWrapEdgeFraction) * 0.5 * g.length();
    if (fp.centre - fp.half_width <= -limit || fp.centre + fp.half_width >= limit)
        throw OutOfBox("packet at t = " + std::to_string(t) + ", v = " + std::to_string(v) +
                       " leaves the monitored interior of the box");
    const double origin = -0.5 * g.length();
    fp.first = static_cast<std::size_t>(std::ceil((fp.centre - fp.half_width - origin) / g.dx()));
    fp.last = static_cast<std::size_t>(std::floor((fp.centre + fp.half_width - origin) / g.dx()));
    return fp;
}

namespace {

cplx packet_value(double t, double v, double x, const Bump& chi) {
    const double speed = -v;
    const double width = std::sqrt(t) * std::pow(speed, 0.75);
    const double amp = std::pow(speed, -0.75) * chi((x - v * t) / width);
    return amp == 0.0 ? cplx(0.0, 0.0) : std::polar(amp, phase(t, x));
}

} // namespace

Field packet(double t, double v, const PacketParams& params, const Grid& g) {
    const PacketFootprint fp = packet_footprint(t, v, params, g);
    const Bump chi(params.chi_half_width());
    CVec vals(g.n());
    for (std::size_t j = fp.first; j <= fp.last && j < g.n(); ++j) vals[j] = packet_value(t, v, g.x(j), chi);
    return Field(g, std::move(vals), Kind::complex);
}

cplx pair_with_packet(const Field& w, double t, double v, const PacketParams& params) {
    const Grid& g = w.grid();
    const PacketFootprint fp = packet_footprint(t, v, params, g);
    const Bump chi(params.chi_half_width());
    cplx sum = 0.0;
    for (std::size_t j = fp.first; j <= fp.last && j < g.n(); ++j)
        sum += w[j] * std::conj(packet_value(t, v, g.x(j), chi));
    return sum * g.dx();
}

cplx gamma(const Snapshot& s, double v, const PacketParams& params) { return pair_with_packet(s.u, s.t, v, params); }

cplx extract_W(cplx gamma, double t, double v) {
    const double rate = 3.0 / std::sqrt(-v) * std::norm(gamma);
    return gamma * std::polar(1.0, -rate * std::log(t));
}

std::vector<std::optional<cplx>> ode_residual(const std::vector<double>& t, const std::vector<cplx>& gamma,
                                              double v) {
    if (t.size() != gamma.size()) throw InvalidArgument("ode_residual: series lengths differ");
    if (t.size() < 3) throw InsufficientData("ode_residual: need at least 3 probe times");
    std::vector<std::optional<cplx>> out(t.size());
    const double coupling = 3.0 / std::sqrt(-v);
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
        const double s0 = std::log(t[i - 1]), s1 = std::log(t[i]), s2 = std::log(t[i + 1]);
        const double h1 = s1 - s0, h2 = s2 - s1;
        const cplx ds = (h1 * h1 * gamma[i + 1] - h2 * h2 * gamma[i - 1] + (h2 * h2 - h1 * h1) * gamma[i]) /
                        (h1 * h2 * (h1 + h2));
        const cplx dt = ds / t[i];
        out[i] = dt - cplx(0.0, coupling / t[i]) * std::norm(gamma[i]) * gamma[i];
    }
    return out;
}

WSampler::WSampler(std::vector<double> v, std::vector<cplx> W) {
    if (v.size() != W.size()) throw InvalidArgument("WSampler: lengths differ");
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    for (std::size_t i : order) {
        v_.push_back(v[i]);
        W_.push_back(W[i]);
    }
}

WSampler::Value WSampler::operator()(double v) const {
    if (v_.empty()) return {cplx(0.0, 0.0), true};
    if (v < v_.front()) return {W_.front(), true};
    if (v > v_.back()) return {W_.back(), true};
    const auto it = std::lower_bound(v_.begin(), v_.end(), v);
    const std::size_t hi = static_cast<std::size_t>(it - v_.begin());
    if (v_[hi] == v || hi == 0) return {W_[hi], false};
    const std::size_t lo = hi - 1;
    const double w = (v - v_[lo]) / (v_[hi] - v_[lo]);
    return {(1.0 - w) * W_[lo] + w * W_[hi], false};
}

ProfileValue asymptotic_profile(double t, double x, const WSampler& W) {
    if (!(t >= 1.0)) throw InvalidArgument("asymptotic_profile: requires t >= 1");
    if (!(x < 0.0)) return {0.0, false};
    const auto [w, extrapolated] = W(x / t);
    const double arg = -2.0 * std::sqrt(t * std::abs(x)) + 3.0 * std::sqrt(t / std::abs(x)) * std::norm(w) * std::log(t);
    return {2.0 / std::sqrt(t) * (w * std::polar(1.0, arg)).real(), extrapolated};
}

double image_frequency(double t, const Grid& g) { return std::sqrt(2.0 * std::max(t, 0.0) / g.length()); }

SpectralField strip_periodic_images(const SpectralField& c, double t) {
    const double cut = image_frequency(t, c.grid());
    if (cut == 0.0) return c;
    const CutoffSpec taper = build_cutoff(1.0);
    return apply_multiplier(c, Symbol{[&taper, cut](double xi) { return cplx(taper.above(cut, xi), 0.0); }, 0.0, true});
}

namespace {

RayErrors ray_errors_from_values(double t, double v, cplx u, cplx ux, cplx gamma) {
    const cplx carrier = std::polar(1.0, phase(t, v * t));
    const double model_u = 2.0 / std::sqrt(t) * (carrier * gamma).real();
    const double model_ux = 2.0 / std::sqrt(t) / std::sqrt(-v) * (cplx(0.0, 1.0) * carrier * gamma).real();
    return {std::abs(u.real() - model_u), std::abs(ux.real() - model_ux)};
}

} // namespace

RayErrors ray_errors(const Snapshot& s, double v, cplx gamma) {
    const double x = v * s.t;
    return ray_errors_from_values(s.t, v, interpolate(strip_periodic_images(forward_transform(s.u), s.t), x),
                              interpolate(strip_periodic_images(forward_transform(s.ux), s.t), x), gamma);
}

RayErrors ray_errors(const Snapshot& s, double v, const PacketParams& params) {
    const cplx g = params.pairing == Pairing::positive ? pair_with_packet(project_sign(s.u, Sign::plus), s.t, v, params)
                                                       : gamma(s, v, params);
    return ray_errors(s, v, g);
}

std::vector<ProbeRecord> probe_snapshot(const Snapshot& s, const PacketParams& params, double delta,
                                        const Field* linear, unsigned jobs) {
    const double t = s.t;
    if (!(t >= 1.0)) throw InvalidArgument("probe_snapshot: requires t >= 1");
    const Field plus = project_sign(s.u, Sign::plus);
    const SpectralField uhat = strip_periodic_images(forward_transform(s.u), t);
    const SpectralField uxhat = strip_periodic_images(forward_transform(s.ux), t);
    std::optional<Field> reference;
    if (linear) reference = params.pairing == Pairing::positive ? project_sign(*linear, Sign::plus) : *linear;
    const CutoffSpec lattice = build_cutoff(delta);

    std::vector<ProbeRecord> out(params.velocities.size());
    parallel_for(out.size(), jobs, [&](std::size_t i) {
        const double v = params.velocities[i];
        ProbeRecord r;
        r.t = t;
        r.v = v;
        r.xi_v = 1.0 / std::sqrt(-v);
        r.N_v = lattice.dyadic(lattice.nearest_dyadic(r.xi_v));
        r.gamma = pair_with_packet(s.u, t, v, params);
        r.gamma_plus = pair_with_packet(plus, t, v, params);
        if (reference) r.gamma_linear = pair_with_packet(*reference, t, v, params);
        r.in_window = in_window(t, v, params.alpha);
        const RayErrors e =
            ray_errors_from_values(t, v, interpolate(uhat, v * t), interpolate(uxhat, v * t), r.estimator(params.pairing));
        r.err_u = e.err_u;
        r.err_ux = e.err_ux;
        r.W = extract_W(r.estimator(params.pairing), t, v);
        out[i] = r;
    });
    return out;
}

void finalize_records(std::vector<ProbeRecord>& records, const PacketParams& params) {
    std::map<double, std::vector<std::size_t>> by_v;
    for (std::size_t i = 0; i < records.size(); ++i) by_v[records[i].v].push_back(i);
    for (auto& [v, idx] : by_v) {
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return records[a].t < records[b].t; });
        std::vector<double> ts;
        std::vector<cplx> gs;
        for (std::size_t i : idx) {
            ProbeRecord& r = records[i];
            r.W = extract_W(r.estimator(params.pairing), r.t, r.v);
            ts.push_back(r.t);
            gs.push_back(r.estimator(params.pairing));
        }
        if (ts.size() < 3) continue;
        const auto res = ode_residual(ts, gs, v);
        for (std::size_t k = 0; k < idx.size(); ++k) records[idx[k]].ode_residual = res[k];
    }
}

} // namespace spulse
