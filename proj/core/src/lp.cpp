#include "spulse/lp.hpp"

#include "spulse/errors.hpp"
#include "spulse/parallel.hpp"
#include "spulse/smooth.hpp"
#include "spulse/spectral.hpp"

#include <cmath>
#include <optional>

namespace spulse {

CutoffSpec::CutoffSpec(double delta, std::function<double(double)> profile)
    : delta_(delta), ratio_(std::exp2(delta)), profile_(std::move(profile)) {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidArgument("cutoff scale delta must be positive");
}

double CutoffSpec::dyadic(int m) const { return std::exp2(delta_ * m); }

std::vector<int> CutoffSpec::dyadic_range(double lo, double hi) const {
    std::vector<int> out;
    if (!(lo > 0.0) || hi < lo) return out;
    const int first = static_cast<int>(std::ceil(std::log2(lo) / delta_ - 1e-9));
    const int last = static_cast<int>(std::floor(std::log2(hi) / delta_ + 1e-9));
    for (int m = first; m <= last; ++m) out.push_back(m);
    return out;
}

int CutoffSpec::nearest_dyadic(double r) const {
    return static_cast<int>(std::lround(std::log2(r) / delta_));
}

CutoffSpec build_cutoff(double delta) {
    if (!(delta > 0.0)) throw InvalidArgument("build_cutoff: delta must be positive");
    const double width = std::exp2(delta) - 1.0;
    return CutoffSpec(delta, [width](double r) { return 1.0 - smoothstep((std::abs(r) - 1.0) / width); });
}

Field project_band(const Field& u, double N, const CutoffSpec& spec) {
    Symbol m{[&spec, N](double xi) { return cplx(spec.band(N, xi), 0.0); }, cplx(0.0, 0.0), true};
    return apply_multiplier(u, m);
}

namespace {

SpectralField keep_sign(const SpectralField& c, Sign sign) {
    const Grid& g = c.grid();
    CVec out(c.coeffs());
    for (std::size_t k = 0; k < g.n(); ++k) {
        const auto mode = g.mode(k);
        const bool keep = (sign == Sign::plus) ? mode > 0 : (mode < 0 && k != g.nyquist_slot());
        if (!keep) out[k] = 0.0;
    }
    return SpectralField(g, std::move(out), Kind::complex);
}

} // namespace

Field project_sign(const Field& u, Sign sign) { return inverse_transform(keep_sign(forward_transform(u), sign)); }

Field project_plus_between(const Field& u, double lo, double hi, const CutoffSpec& spec) {
    const SpectralField c = forward_transform(u);
    const Grid& g = c.grid();
    CVec out(g.n());
    for (std::size_t k = 1; k < g.n() / 2; ++k) out[k] = c[k] * spec.between(lo, hi, g.xi(k));
    return inverse_transform(SpectralField(g, std::move(out), Kind::complex));
}

double hyperbolic_window(double t, double N, double x, const CutoffSpec& spec) {
    if (!(x < 0.0)) return 0.0;
    const double centre = t / (N * N);
    return spec.between(centre / 3.0, 3.0 * centre, -x);
}

std::vector<int> decomposition_bands(const Grid& g, double t, const CutoffSpec& spec) {
    const double xi_lo = g.dxi();
    const double xi_hi = g.dxi() * static_cast<double>(g.n() / 2 - 1);
    std::vector<int> out;
    const double lo = xi_lo / spec.ratio();
    const double hi = std::min(t, xi_hi * spec.ratio());
    for (int m : spec.dyadic_range(lo, hi)) {
        const double N = spec.dyadic(m);
        if (N > lo && N < xi_hi * spec.ratio()) out.push_back(m);
    }
    return out;
}

DecompositionResult hyp_ell_decompose(const Field& u, double t, const CutoffSpec& spec, unsigned jobs) {
    if (!(t >= 1.0)) throw InvalidArgument("hyp_ell_decompose: requires t >= 1");
    const Grid& g = u.grid();
    const std::size_t n = g.n();
    const SpectralField plus_hat = keep_sign(forward_transform(u), Sign::plus);
    Field plus = inverse_transform(plus_hat);

    const std::vector<int> ms = decomposition_bands(g, t, spec);
    std::vector<std::optional<BandParts>> parts(ms.size());
    parallel_for(ms.size(), jobs, [&](std::size_t b) {
        const int m = ms[b];
        const double N = spec.dyadic(m);
        CVec coeffs(n);
        for (std::size_t k = 1; k < n / 2; ++k) coeffs[k] = plus_hat[k] * spec.band(N, g.xi(k));
        Field band = inverse_transform(SpectralField(g, std::move(coeffs), Kind::complex));

        RVec window(n);
        CVec hyp(n), ell(n);
        for (std::size_t j = 0; j < n; ++j) {
            window[j] = hyperbolic_window(t, N, g.x(j), spec);
            hyp[j] = window[j] * band[j];
            ell[j] = band[j] - hyp[j];
        }
        parts[b].emplace(BandParts{m, N, std::move(band), Field(g, std::move(hyp), Kind::complex),
                                   Field(g, std::move(ell), Kind::complex), std::move(window)});
    });

    CVec hyp_sum(n);
    std::vector<BandParts> bands;
    bands.reserve(parts.size());
    for (auto& p : parts) {
        for (std::size_t j = 0; j < n; ++j) hyp_sum[j] += p->hyp[j];
        bands.push_back(std::move(*p));
    }
    CVec ell_sum(n);
    for (std::size_t j = 0; j < n; ++j) ell_sum[j] = plus[j] - hyp_sum[j];
    return DecompositionResult{t, std::move(bands), std::move(plus), Field(g, std::move(hyp_sum), Kind::complex),
                               Field(g, std::move(ell_sum), Kind::complex)};
}

LocalizationRatio localization_check(const Field& u, double N, double a, double b, double c, double R,
                                     const CutoffSpec& spec) {
    if (a < 0.0 || a + c < 0.0) throw InvalidArgument("localization_check: requires a >= 0 and a + c >= 0");
    if (b < 0.0) throw InvalidArgument("localization_check: spatial weight exponent must be >= 0");
    const Grid& g = u.grid();
    const std::size_t n = g.n();

    const SpectralField uh = forward_transform(u);
    CVec pn(n);
    for (std::size_t k = 1; k < n / 2; ++k) pn[k] = uh[k] * spec.band(N, g.xi(k));
    const Field base = inverse_transform(SpectralField(g, std::move(pn), Kind::complex));
    const double base_norm = l2_norm(base);
    if (base_norm <= kDegenerateBandFraction * l2_norm(uh)) return {0.0, true};

    CVec weighted(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double ax = std::abs(g.x(j));
        const double wx = (b == 0.0 ? 1.0 : std::pow(ax, b)) * spec.band(R, ax);
        weighted[j] = wx * base[j];
    }
    const SpectralField wh = forward_transform(Field(g, std::move(weighted), Kind::complex));
    CVec rest(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double xi = g.xi(k);
        const double grad = (k == 0) ? (a == 0.0 ? 1.0 : 0.0) : std::pow(std::abs(xi), a);
        const double keep = (g.mode(k) > 0) ? spec.between(N / spec.ratio(), spec.ratio() * N, xi) : 0.0;
        rest[k] = (1.0 - keep) * grad * wh[k];
    }
    const double num = l2_norm(SpectralField(g, std::move(rest), Kind::complex));
    const double den = std::pow(N, -c) * std::pow(R, -a + b - c) * base_norm;
    return {num / den, false};
}

} // namespace spulse
