#include "spulse/diagnostics.hpp"

#include "spulse/errors.hpp"
#include "spulse/evolution.hpp"
#include "spulse/parallel.hpp"
#include "spulse/smooth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace spulse {

double seam_taper(const Grid& g, double x) {
    const double half = 0.5 * g.length();
    const double width = 0.5 * kSeamTaperFraction * g.length();
    return 1.0 - smoothstep((std::abs(x) - (half - width)) / width);
}

Field j_field(const Field& u, double t, double mean_tol) {
    require_zero_mean(u, mean_tol, "j_field");
    const Grid& g = u.grid();
    const Field ux = derivative(u);
    CVec out(g.n());
    if (t == 0.0) {
        for (std::size_t j = 0; j < g.n(); ++j) out[j] = g.x(j) * seam_taper(g, g.x(j)) * ux[j];
    } else {
        const Field inv = apply_multiplier(u, symbols::antiderivative());
        for (std::size_t j = 0; j < g.n(); ++j) out[j] = g.x(j) * seam_taper(g, g.x(j)) * ux[j] - t * inv[j];
    }
    return Field(g, std::move(out), u.kind());
}

Field j_field(const Snapshot& s) {
    const Grid& g = s.u.grid();
    CVec out(g.n());
    for (std::size_t j = 0; j < g.n(); ++j) out[j] = g.x(j) * seam_taper(g, g.x(j)) * s.ux[j] - s.t * s.inv[j];
    return Field(g, std::move(out), Kind::real);
}

Field jplus_field(double t, const Field& target, double mean_tol) {
    require_zero_mean(target, mean_tol, "jplus_field");
    const Grid& g = target.grid();
    CVec out(g.n());
    if (t == 0.0) {
        for (std::size_t j = 0; j < g.n(); ++j)
            out[j] = std::sqrt(std::abs(g.x(j))) * seam_taper(g, g.x(j)) * target[j];
    } else {
        const Field inv = apply_multiplier(target, symbols::antiderivative());
        const cplx c(0.0, -std::sqrt(t));
        for (std::size_t j = 0; j < g.n(); ++j)
            out[j] = std::sqrt(std::abs(g.x(j))) * seam_taper(g, g.x(j)) * target[j] + c * inv[j];
    }
    return Field(g, std::move(out), Kind::complex);
}

Field jplus_field(const Snapshot& s, const Field& target) { return jplus_field(s.t, target); }

Field s_field(const Field& u, double t, int p) {
    if (linf_norm(u) == 0.0) return Field::zeros(u.grid(), Kind::real);
    const Field j = j_field(u, t);
    const Field nl = nonlinearity(u, p);
    const Grid& g = u.grid();
    CVec out(g.n());
    for (std::size_t k = 0; k < g.n(); ++k) out[k] = -t * nl[k] + j[k] - u[k];
    return Field(g, std::move(out), Kind::real);
}

Field s_field(const Snapshot& s, int p) {
    if (s.norms.l2 == 0.0) return Field::zeros(s.u.grid(), Kind::real);
    const Field j = j_field(s);
    const Field nl = nonlinearity(s.u, p);
    const Grid& g = s.u.grid();
    CVec out(g.n());
    for (std::size_t k = 0; k < g.n(); ++k) out[k] = -s.t * nl[k] + j[k] - s.u[k];
    return Field(g, std::move(out), Kind::real);
}

double hs_norm(const SpectralField& c, double s) {
    const Grid& g = c.grid();
    double sum = 0.0;
    for (std::size_t k = 0; k < g.n(); ++k) {
        const double xi = g.xi(k);
        sum += std::pow(1.0 + xi * xi, s) * std::norm(c[k]);
    }
    return std::sqrt(sum * g.dxi());
}

double hm1_norm(const SpectralField& c) {
    const Grid& g = c.grid();
    double sum = 0.0;
    for (std::size_t k = 1; k < g.n(); ++k) {
        const double xi = g.xi(k);
        sum += std::norm(c[k]) / (xi * xi);
    }
    return std::sqrt(sum * g.dxi());
}

double wrap_fraction(const Field& u, double edge_fraction) {
    const Grid& g = u.grid();
    const double edge = (1.0 - edge_fraction) * 0.5 * g.length();
    double total = 0.0, outer = 0.0;
    for (std::size_t j = 0; j < g.n(); ++j) {
        const double m = std::norm(u[j]);
        total += m;
        if (std::abs(g.x(j)) >= edge) outer += m;
    }
    return total > 0.0 ? outer / total : 0.0;
}

Snapshot make_snapshot(const Field& u, double t, double s, int p, double mean_tol) {
    require_zero_mean(u, mean_tol, "snapshot");
    const SpectralField c = forward_transform(u);
    Field ux = inverse_transform(apply_multiplier(c, symbols::derivative()));
    Field inv = inverse_transform(apply_multiplier(c, symbols::antiderivative()));

    Snapshot snap{t, u, std::move(ux), std::move(inv), NormRecord{}, std::nullopt};
    NormRecord& r = snap.norms;
    r.t = t;
    r.s = s;
    r.l2 = l2_norm(u);
    r.hs = hs_norm(c, s);
    r.hm1 = hm1_norm(c);
    r.jdx_l2 = l2_norm(j_field(snap));
    r.xs = std::sqrt(r.hs * r.hs + r.hm1 * r.hm1 + r.jdx_l2 * r.jdx_l2);
    r.linf = sup_norm(u);
    r.ux_linf = sup_norm(snap.ux);
    r.su_l2 = l2_norm(s_field(snap, p));
    r.wrapfrac = wrap_fraction(u);
    return snap;
}

NormRecord compute_norms(const Field& u, double t, double s, int p, double mean_tol) {
    return make_snapshot(u, t, s, p, mean_tol).norms;
}

double xs_norm_fourier(const Field& u, double t, double s, double mean_tol) {
    const SpectralField c = forward_transform(u);
    const SpectralField jc = forward_transform(j_field(u, t, mean_tol));
    const Grid& g = u.grid();
    double sum = 0.0;
    for (std::size_t k = 0; k < g.n(); ++k) {
        const double xi = g.xi(k);
        double w = std::pow(1.0 + xi * xi, s);
        if (k != 0) w += 1.0 / (xi * xi);
        sum += w * std::norm(c[k]) + std::norm(jc[k]);
    }
    return std::sqrt(sum * g.dxi());
}

FitResult loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw InvalidArgument("loglog_fit: series lengths differ");
    if (x.size() < 2) throw InsufficientData("loglog_fit: need at least 2 samples");
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(y[i] > 0.0) || !(x[i] > 0.0)) throw InvalidArgument("loglog_fit: samples must be positive");
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    const double n = static_cast<double>(lx.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (sxx == 0.0) throw InsufficientData("loglog_fit: all samples at one abscissa");
    FitResult out;
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        const double r = ly[i] - (out.intercept + out.slope * lx[i]);
        ss += r * r;
    }
    out.residual = std::sqrt(ss / n);
    out.samples = lx.size();
    return out;
}

FitResult decay_fit(const std::vector<double>& t, const std::vector<double>& y, double t_lo, double t_hi) {
    if (t.size() != y.size()) throw InvalidArgument("decay_fit: series lengths differ");
    std::vector<double> wt, wy;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_lo || t[i] > t_hi) continue;
        wt.push_back(t[i]);
        wy.push_back(y[i]);
    }
    if (wt.size() < 8)
        throw InsufficientData("decay_fit: " + std::to_string(wt.size()) + " samples in window, need 8");
    return loglog_fit(wt, wy);
}

namespace {

double scaling_quotient(const Field& u, double t) {
    const SpectralField c = forward_transform(u);
    const double ux_inf = linf_norm(inverse_transform(apply_multiplier(c, symbols::derivative())));
    const double h4 = l2_norm(apply_multiplier(c, symbols::abs_power(4.0)));
    const double j = l2_norm(j_field(u, t));
    return std::sqrt(t) * ux_inf / (std::sqrt(h4) * std::sqrt(j));
}

} // namespace

ScalingResult scaling_selftest(const Field& u, double t, int lambda) {
    if (lambda != 2 && lambda != 4) throw InvalidArgument("scaling_selftest: lambda must be 2 or 4");
    if (!(t > 0.0)) throw InvalidArgument("scaling_selftest: t must be positive");
    if (linf_norm(u) == 0.0) return {0.0, true};
    const Grid& g = u.grid();
    const Grid shrunk(g.n(), g.length() / lambda);
    CVec vals(u.values());
    for (auto& v : vals) v /= static_cast<double>(lambda);
    const Field scaled(shrunk, std::move(vals), u.kind());
    return {scaling_quotient(u, t) / scaling_quotient(scaled, lambda * t), false};
}

double band_norm_equivalence(const Field& u, double t, double s, const CutoffSpec& spec, unsigned jobs) {
    const Grid& g = u.grid();
    const double xi_lo = g.dxi();
    const double xi_hi = g.dxi() * static_cast<double>(g.n() / 2);
    const std::vector<int> ms = spec.dyadic_range(xi_lo / spec.ratio(), xi_hi * spec.ratio());
    std::vector<double> parts(ms.size());
    parallel_for(ms.size(), jobs, [&](std::size_t i) {
        const Field band = project_band(u, spec.dyadic(ms[i]), spec);
        parts[i] = l2_norm(band) == 0.0 ? 0.0 : std::pow(compute_norms(band, t, s).xs, 2);
    });
    double total = 0.0;
    for (double v : parts) total += v;
    return std::sqrt(total) / compute_norms(u, t, s).xs;
}

} // namespace spulse
