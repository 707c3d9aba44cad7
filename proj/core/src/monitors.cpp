#include "spulse/monitors.hpp"

#include "spulse/diagnostics.hpp"
#include "spulse/errors.hpp"
#include "spulse/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace spulse {

DecayMonitors decay_monitors(const Snapshot& s, const CutoffSpec& spec, unsigned jobs) {
    const double t = s.t;
    if (!(t >= 1.0)) throw InvalidArgument("decay_monitors: requires t >= 1");
    DecayMonitors out;
    out.t = t;
    const double xs = s.norms.xs;
    if (xs == 0.0) return out;

    const DecompositionResult d = hyp_ell_decompose(s.u, t, spec, jobs);
    const Field hyp_x = derivative(d.hyp);
    const Field ell = scale(d.ell, 2.0);
    CVec ell_re(ell.values());
    for (auto& v : ell_re) v = cplx(v.real(), 0.0);
    const Field ell_real(ell.grid(), std::move(ell_re), Kind::real);
    const Field ell_x = derivative(ell_real);

    const Grid& g = s.u.grid();
    const double sob = s.norms.s;
    const double root_t = std::sqrt(t);
    for (std::size_t j = 0; j < g.n(); ++j) {
        const double x = g.x(j);
        if (!(x < 0.0)) continue;
        const double r = std::abs(x) / t;
        const double env = std::min(std::pow(r, sob / 4.0 - 0.5), std::pow(r, -0.75)) / root_t;
        const double env_x = std::min(std::pow(r, sob / 4.0 - 1.0), std::pow(r, -1.25)) / root_t;
        out.hyp = std::max(out.hyp, std::abs(d.hyp[j]) / env);
        out.hyp_x = std::max(out.hyp_x, std::abs(hyp_x[j]) / env_x);
    }
    const double log_factor = 1.0 + std::log(t);
    const double env_ell = std::pow(t, -(2.0 * sob - 1.0) / (2.0 * sob + 2.0)) * log_factor;
    const double env_ell_x = std::pow(t, -(2.0 * sob - 3.0) / (2.0 * sob + 2.0)) * log_factor;
    out.ell = linf_norm(ell_real) / env_ell;
    out.ell_x = linf_norm(ell_x) / env_ell_x;

    const Field jp = jplus_field(t, hyp_x);
    const Field weighted = pointwise(
        jp, [&g](double x) { return cplx(std::sqrt(std::abs(x)) * seam_taper(g, x), 0.0); }, Kind::complex);
    out.weighted = l2_norm(weighted);

    out.hyp /= xs;
    out.hyp_x /= xs;
    out.ell /= xs;
    out.ell_x /= xs;
    out.weighted /= xs;
    return out;
}

} // namespace spulse
