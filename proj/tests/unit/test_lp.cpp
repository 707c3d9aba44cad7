#include "spulse/errors.hpp"
#include "spulse/lp.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace spulse;
using namespace testing_support;

namespace {

double band_sum(const CutoffSpec& spec, double lo, double hi, double xi) {
    double s = 0.0;
    for (int m : spec.dyadic_range(lo, hi)) s += spec.band(spec.dyadic(m), xi);
    return s;
}

} // namespace

TEST_SUITE("lp_decomp") {

TEST_CASE("cutoff profile shape") {
    for (double delta : {1.0, 0.5, 0.25}) {
        const CutoffSpec spec = build_cutoff(delta);
        CHECK(spec.sigma(0.0) == 1.0);
        CHECK(spec.sigma(1.0) == 1.0);
        CHECK(spec.sigma(spec.ratio() * 1.01) == 0.0);
        CHECK(spec.sigma(spec.ratio()) == 0.0);
        double prev = 1.0;
        for (double r = 0.0; r < 3.0; r += 0.01) {
            CHECK(spec.sigma(-r) == spec.sigma(r));
            CHECK(spec.sigma(r) <= prev);
            CHECK(spec.sigma(r) >= 0.0);
            prev = spec.sigma(r);
        }
    }
    CHECK_THROWS_AS(build_cutoff(0.0), InvalidArgument);
    CHECK_THROWS_AS(build_cutoff(-1.0), InvalidArgument);
}

TEST_CASE("telescoping between-symbol matches its definition") {
    const CutoffSpec spec = build_cutoff(1.0);
    for (double r = 0.01; r < 20.0; r *= 1.07)
        CHECK(spec.at_most(4.0, r) - spec.below(0.5, r) == spec.between(0.5, 4.0, r));
}

TEST_CASE("dyadic bands sum to one across the covered range") {
    const CutoffSpec spec = build_cutoff(1.0);
    double err = 0.0;
    for (double xi = std::exp2(-9.0); xi <= std::exp2(9.0); xi *= 1.0 + 1.0 / 512.0)
        err = std::max({err, std::abs(band_sum(spec, std::exp2(-10.0), std::exp2(10.0), xi) - 1.0),
                        std::abs(band_sum(spec, std::exp2(-10.0), std::exp2(10.0), -xi) - 1.0)});
    CHECK(err <= 1e-12);
}

TEST_CASE("band projection keeps or removes a single mode") {
    const CutoffSpec spec = build_cutoff(1.0);
    const Grid g(256, 2.0 * kPi * 8.0); // xi = k / 8
    const double xi0 = 1.0;
    const Field u = Field::sample(g, [xi0](double x) { return std::cos(xi0 * x); }, Kind::real);
    CHECK(max_abs_diff(project_band(u, 1.0, spec), u) <= 1e-13);
    CHECK(linf_norm(project_band(u, 4.0, spec)) <= 1e-14);
    CHECK(linf_norm(project_band(u, 0.25, spec)) <= 1e-14);
}

TEST_CASE("band projections are almost orthogonal") {
    const CutoffSpec spec = build_cutoff(1.0);
    const Grid g(1024, 100.0);
    for (unsigned seed : {1u, 2u, 3u}) {
        const Field u = random_bandlimited(g, 400, seed);
        double sum = 0.0;
        for (int m : spec.dyadic_range(g.dxi() / 2.0, g.dxi() * 1024.0)) sum += std::pow(l2_norm(project_band(u, spec.dyadic(m), spec)), 2);
        const double ratio = std::pow(l2_norm(u), 2) / sum;
        CHECK(ratio >= 1.0 / 3.0);
        CHECK(ratio <= 3.0);
    }
}

TEST_CASE("band projections recompose a band-limited field") {
    const CutoffSpec spec = build_cutoff(1.0);
    const Grid g(2048, 200.0);
    const Field u = random_bandlimited(g, 600, 5);
    // Spectrum in [dxi, 600 dxi]; cover it with margin 2^{2 delta} on both sides.
    CVec acc(g.n());
    for (int m : spec.dyadic_range(g.dxi() / 4.0, 4.0 * 600.0 * g.dxi())) {
        const Field p = project_band(u, spec.dyadic(m), spec);
        for (std::size_t j = 0; j < g.n(); ++j) acc[j] += p[j];
    }
    CHECK(max_abs_diff(Field(g, std::move(acc), Kind::complex), u) <= 1e-10 * linf_norm(u));
}

TEST_CASE("sign projection of cos") {
    const Grid g(128, 2.0 * kPi * 4.0);
    const Field u = Field::sample(g, [](double x) { return std::cos(x); }, Kind::real);
    const Field plus = project_sign(u, Sign::plus);
    CHECK(max_abs_diff(plus, [](double x) { return 0.5 * std::polar(1.0, x); }) <= 1e-14);
    CHECK(max_abs_diff(project_sign(u, Sign::minus), [](double x) { return 0.5 * std::polar(1.0, -x); }) <= 1e-14);
}

TEST_CASE("sign projections split a real zero-mean field evenly") {
    const Grid g(2048, 64.0);
    const Field u = gaussian_derivative(g);
    const double half = l2_norm(u) / std::sqrt(2.0);
    CHECK(std::abs(l2_norm(project_sign(u, Sign::plus)) - half) <= 1e-12 * half);
    CHECK(std::abs(l2_norm(project_sign(u, Sign::minus)) - half) <= 1e-12 * half);
    CHECK(linf_norm(project_sign(Field::zeros(g), Sign::plus)) == 0.0);
}

TEST_CASE("zero field decomposes into zero parts") {
    const CutoffSpec spec = build_cutoff(1.0);
    const DecompositionResult d = hyp_ell_decompose(Field::zeros(Grid(512, 64.0)), 4.0, spec);
    CHECK(linf_norm(d.plus) == 0.0);
    CHECK(linf_norm(d.hyp) == 0.0);
    CHECK(linf_norm(d.ell) == 0.0);
    for (const auto& b : d.bands) CHECK(linf_norm(b.plus) == 0.0);
}

TEST_CASE("decomposition rejects t < 1") {
    const CutoffSpec spec = build_cutoff(1.0);
    CHECK_THROWS_AS(hyp_ell_decompose(Field::zeros(Grid(64, 8.0)), 0.5, spec), InvalidArgument);
}

TEST_CASE("hyperbolic parts live on x < 0 inside their annulus and recompose exactly") {
    const CutoffSpec spec = build_cutoff(1.0);
    const Grid g(4096, 400.0);
    const double t = 30.0;
    const Field u = free_propagate(gaussian_derivative(g), t);
    const DecompositionResult d = hyp_ell_decompose(u, t, spec);
    REQUIRE(!d.bands.empty());
    for (const auto& b : d.bands) {
        CHECK(b.N <= t);
        const double lo = t / (b.N * b.N) / (3.0 * spec.ratio());
        const double hi = 3.0 * spec.ratio() * t / (b.N * b.N);
        for (std::size_t j = 0; j < g.n(); ++j) {
            const double x = g.x(j);
            CHECK(std::abs(b.hyp[j] + b.ell[j] - b.plus[j]) <= 0x1p-52 * std::abs(b.plus[j]));
            if (x >= 0.0 || -x < lo || -x > hi) CHECK(b.hyp[j] == cplx(0.0, 0.0));
        }
    }
    CHECK(max_abs_diff(add(d.hyp, d.ell), d.plus) <= 0x1p-52 * linf_norm(d.plus));
}

TEST_CASE("few bands see any given space-time point") {
    for (double delta : {1.0, 0.5}) {
        const CutoffSpec spec = build_cutoff(delta);
        const int bound = static_cast<int>(std::ceil(5.0 / delta));
        int worst = 0;
        for (double t = 1.0; t <= 1024.0; t *= 1.3) {
            for (double ax = 1e-3; ax < 1e4; ax *= 1.05) {
                if (ax * t < 1.0 / (3.0 * spec.ratio())) continue;
                int count = 0;
                for (int m : spec.dyadic_range(1e-6, t))
                    if (hyperbolic_window(t, spec.dyadic(m), -ax, spec) != 0.0) ++count;
                worst = std::max(worst, count);
            }
        }
        CHECK(worst <= bound);
        CHECK(worst >= 1);
    }
}

TEST_CASE("localization ratio: degenerate and trivial cases") {
    const CutoffSpec spec = build_cutoff(1.0);
    const Grid g(1024, 200.0);
    const Field low = Field::sample(g, [&g](double x) { return std::cos(g.dxi() * 3.0 * x); }, Kind::real);
    const LocalizationRatio r = localization_check(low, 8.0, 0.0, 0.0, 0.0, 10.0, spec);
    CHECK(r.degenerate);
    CHECK(r.ratio == 0.0);

    const Field u = random_bandlimited(g, 200, 9);
    CHECK(localization_check(u, 2.0, 0.0, 0.0, 0.0, 1e6, spec).ratio <= 1e-12);
    CHECK_THROWS_AS(localization_check(u, 2.0, -1.0, 0.0, 0.0, 4.0, spec), InvalidArgument);
}

TEST_CASE("localization ratio stays bounded under N doubling") {
    const CutoffSpec spec = build_cutoff(1.0);
    const Grid g(8192, 512.0);
    // Gaussian-band data: a wide Gaussian envelope times cosines at every dyadic scale.
    const Field u = Field::sample(
        g,
        [](double x) {
            double s = 0.0;
            for (double N = 0.5; N <= 32.0; N *= 2.0) s += std::exp(-x * x * N * N / 64.0) * std::cos(N * x);
            return s;
        },
        Kind::real);
    // Sweep maximum per N; single entries fall off faster than any power of N.
    std::vector<double> sweep_max;
    for (double N = 1.0; N <= 16.0; N *= 2.0) {
        double m = 0.0;
        for (double a : {0.0, 1.0})
            for (double b : {0.0, 1.0})
                for (double c : {0.0, 1.0, 2.0})
                    for (double R = 1.0; R <= 256.0; R *= 2.0) {
                        const LocalizationRatio r = localization_check(u, N, a, b, c, R, spec);
                        REQUIRE(!r.degenerate);
                        REQUIRE(std::isfinite(r.ratio));
                        m = std::max(m, r.ratio);
                    }
        sweep_max.push_back(m);
    }
    for (std::size_t i = 1; i < sweep_max.size(); ++i) {
        const double step = sweep_max[i - 1] / sweep_max[i];
        CHECK(step >= 0.25);
        CHECK(step <= 4.0);
    }
}

} // TEST_SUITE
