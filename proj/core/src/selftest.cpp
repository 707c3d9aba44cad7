#include "spulse/diagnostics.hpp"
#include "spulse/errors.hpp"
#include "spulse/harness.hpp"
#include "spulse/io.hpp"
#include "spulse/lp.hpp"
#include "spulse/smooth.hpp"
#include "spulse/spectral.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <ostream>

namespace spulse {
namespace {

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

double max_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

Field test_pulse(const Grid& g, double eps) {
    return Field::sample(g, [eps](double x) { return -2.0 * eps * x * std::exp(-x * x); }, Kind::real);
}

CutoffSpec cutoff_for(InjectedFault fault) {
    const CutoffSpec good = build_cutoff(1.0);
    if (fault != InjectedFault::cutoff) return good;
    return CutoffSpec(1.0, [good](double r) { return 0.9 * good.sigma(r); });
}

SelftestCheck check(const std::string& name, double error, double tol) {
    return {name, error <= tol, "error " + sci(error) + " (tolerance " + sci(tol) + ")"};
}

} // namespace

std::vector<SelftestCheck> run_selftest(InjectedFault fault, unsigned jobs) {
    std::vector<SelftestCheck> out;
    const auto guarded = [&out](const std::string& name, const std::function<SelftestCheck()>& body) {
        try {
            out.push_back(body());
        } catch (const std::exception& e) {
            out.push_back({name, false, std::string("threw: ") + e.what()});
        }
    };

    const Grid g(2048, 64.0);
    const Field u = test_pulse(g, 1.0);

    guarded("transform round trip", [&] {
        return check("transform round trip", max_diff(inverse_transform(forward_transform(u)), u), 1e-13);
    });
    guarded("Parseval", [&] {
        const double a = l2_norm(u);
        const double b = l2_norm(forward_transform(u));
        return check("Parseval", std::abs(a - b) / a, 1e-13);
    });
    guarded("free propagator unitarity", [&] {
        const double a = l2_norm(u);
        return check("free propagator unitarity", std::abs(l2_norm(free_propagate(u, 3.7)) - a) / a, 1e-13);
    });
    guarded("free propagator group law", [&] {
        const Field two = free_propagate(free_propagate(u, 1.25), 2.5);
        const Field one = free_propagate(u, 3.75);
        return check("free propagator group law", max_diff(two, one) / linf_norm(one), 1e-12);
    });
    guarded("vector field conjugation", [&] {
        // J d_x U(t) u0 = U(t) (x d_x u0); a carrier at |xi| = 4 keeps the
        // spectrum away from the origin so nothing reaches the seam.
        const Field u0 =
            Field::sample(g, [](double x) { return std::exp(-x * x / 8.0) * std::sin(4.0 * x); }, Kind::real);
        const double t = 10.0;
        const Field lhs = j_field(free_propagate(u0, t), t);
        const Field xux = pointwise(derivative(u0), [](double x) { return cplx(x, 0.0); }, Kind::real);
        const Field rhs = free_propagate(xux, t);
        return check("vector field conjugation", l2_norm(subtract(lhs, rhs)) / l2_norm(rhs), 1e-8);
    });
    for (int lambda : {2, 4}) {
        const std::string name = "scaling self-test lambda = " + std::to_string(lambda);
        guarded(name, [&] {
            const ScalingResult r = scaling_selftest(u, 1.5, lambda);
            return check(name, std::abs(r.ratio - 1.0), 1e-10);
        });
    }

    const CutoffSpec spec = cutoff_for(fault);
    guarded("LP cutoff sigma(0) = 1", [&] {
        return check("LP cutoff sigma(0) = 1", std::abs(spec.sigma(0.0) - 1.0), 1e-15);
    });
    guarded("LP partition of unity", [&] {
        // The telescoping band sum equals sigma(r / N_max) - sigma(2^delta r / N_min) -> sigma(0).
        const std::vector<int> ms = spec.dyadic_range(1e-8, 1e8);
        double err = 0.0;
        for (std::size_t k = 1; k < g.n() / 2; ++k) {
            double sum = 0.0;
            for (int m : ms) sum += spec.band(spec.dyadic(m), g.xi(k));
            err = std::max(err, std::abs(sum - 1.0));
        }
        return check("LP partition of unity", err, 1e-13);
    });
    guarded("hyperbolic/elliptic recomposition", [&] {
        const double t = 8.0;
        const DecompositionResult d = hyp_ell_decompose(free_propagate(u, t), t, spec, jobs);
        double err = max_diff(add(d.hyp, d.ell), d.plus);
        CVec hyp(g.n());
        for (const auto& b : d.bands)
            for (std::size_t j = 0; j < g.n(); ++j) hyp[j] += b.hyp[j];
        err = std::max(err, max_diff(Field(g, std::move(hyp), Kind::complex), d.hyp));
        return check("hyperbolic/elliptic recomposition", err / linf_norm(d.plus), 1e-14);
    });
    guarded("sign split recomposition", [&] {
        const Field plus = project_sign(u, Sign::plus);
        const Field minus = project_sign(u, Sign::minus);
        return check("sign split recomposition", max_diff(add(plus, minus), u) / linf_norm(u), 1e-13);
    });
    return out;
}

int cmd_selftest(InjectedFault fault, const RunOptions& opts, std::ostream& out, std::ostream& err) {
    const auto checks = run_selftest(fault, opts.jobs);
    std::string report;
    std::size_t failed = 0;
    for (const auto& c : checks) {
        report += (c.passed ? "PASS " : "FAIL ") + c.name + ": " + c.detail + "\n";
        if (!c.passed) ++failed;
    }
    report += failed == 0 ? "selftest: all " + std::to_string(checks.size()) + " identities hold\n"
                          : "selftest: " + std::to_string(failed) + " of " + std::to_string(checks.size()) +
                                " identities failed\n";
    out << report;
    if (!opts.out_dir.empty()) {
        std::filesystem::create_directories(opts.out_dir);
        write_text((std::filesystem::path(opts.out_dir) / "selftest_report.txt").string(), report);
    }
    if (failed) err << "selftest: failed\n";
    return failed == 0 ? kExitOk : kExitMonitor;
}

} // namespace spulse
