#include "spulse/appendix.hpp"

#include "spulse/diagnostics.hpp"
#include "spulse/errors.hpp"
#include "spulse/grid.hpp"
#include "spulse/parallel.hpp"
#include "spulse/smooth.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace spulse {
namespace {

constexpr double kDoublingTolerance = 1e-8;

const Bump& unit_bump() {
    static const Bump chi(1.0);
    return chi;
}

// Trapezoid over eta in [-1, 1] (xi = 2N + N eta); the integrand vanishes to
// all orders at both ends.
template <class F>
double integrate(const CounterexampleCase& c, int panels, F&& integrand) {
    const double h = 2.0 / panels;
    double sum = 0.0;
    for (int i = 1; i < panels; ++i) {
        const double eta = -1.0 + i * h;
        sum += integrand(eta, c.N * (2.0 + eta));
    }
    return sum * h * c.N;
}

template <class F>
double gated(const CounterexampleCase& c, const char* what, F&& integrand) {
    const double coarse = integrate(c, c.quad_points, integrand);
    const double fine = integrate(c, 2 * c.quad_points, integrand);
    if (std::abs(fine - coarse) > kDoublingTolerance * std::abs(fine))
        throw QuadratureUnderResolved(std::string(what) + " at N = " + std::to_string(c.N) +
                                      " changes by more than 1e-8 under panel doubling");
    return coarse;
}

double sup_derivative(const CounterexampleCase& c, int panels, double extent, int points) {
    const Bump& chi = unit_bump();
    const double h = 2.0 / panels;
    std::vector<double> weight(panels + 1);
    for (int i = 0; i <= panels; ++i) {
        const double eta = -1.0 + i * h;
        weight[i] = (2.0 + eta) * chi(eta);
    }
    double best = 0.0;
    // |d_x phi(x)| = N^2 / sqrt(2 pi) |int (2 + eta) chi(eta) e^{i y eta} d eta| with y = N x.
    for (int k = 0; k < points; ++k) {
        const double y = -extent + 2.0 * extent * k / (points - 1);
        const cplx step = std::polar(1.0, y * h);
        cplx rot = std::polar(1.0, -y);
        cplx sum = 0.0;
        for (int i = 0; i <= panels; ++i) {
            sum += weight[i] * rot;
            rot *= step;
            if ((i & 63) == 63) rot = std::polar(1.0, y * (-1.0 + (i + 1) * h));
        }
        best = std::max(best, std::abs(sum) * h);
    }
    return c.N * c.N * best / std::sqrt(2.0 * std::numbers::pi);
}

} // namespace

CounterexampleCase CounterexampleCase::make(double N, double rho, int quad_points) {
    if (!(rho > 0.0 && rho < 0.5)) throw InvalidArgument("rho must lie in (0, 1/2)");
    if (!(N >= 1.0)) throw InvalidArgument("N must be >= 1");
    if (quad_points < 16) throw InvalidArgument("quadrature needs at least 16 panels");
    CounterexampleCase c;
    c.N = N;
    c.rho = rho;
    c.t = std::pow(N, 2.0 + 1.0 / (2.0 * rho));
    c.quad_points = quad_points;
    return c;
}

double sobolev_index_original(double rho) { return (2.0 - 2.0 * rho) / (1.0 - 2.0 * rho); }
double sobolev_index_corrected(double rho) { return (4.0 - 2.0 * rho) / (1.0 - 2.0 * rho); }

double predicted_original_exponent(double rho) { return 2.0 - std::max(1.5, 2.0 - 1.0 / (4.0 * rho)); }

bool near_degenerate(double rho) { return std::abs((2.0 - 1.0 / (4.0 * rho)) - 1.5) < 0.05; }

double lhs(const CounterexampleCase& c, double extent, int points) {
    if (points < 3) throw InvalidArgument("lhs: need at least 3 sample points");
    const double coarse = sup_derivative(c, c.quad_points, extent, points);
    const double fine = sup_derivative(c, 2 * c.quad_points, extent, points);
    if (std::abs(fine - coarse) > kDoublingTolerance * fine)
        throw QuadratureUnderResolved("lhs changes by more than 1e-8 under panel doubling");
    return coarse;
}

double log_hs_norm(const CounterexampleCase& c, double s, bool apply_flow) {
    const Bump& chi = unit_bump();
    // Weights are scaled by <3N>^{2s} so indices past 100 stay in range.
    const double ref = 1.0 + 9.0 * c.N * c.N;
    const double integral = gated(c, "H^s norm", [&](double eta, double xi) {
        const double w = std::pow((1.0 + xi * xi) / ref, s);
        const double amp = chi(eta);
        const double mod2 = apply_flow ? std::norm(std::polar(amp, c.t / xi)) : amp * amp;
        return w * mod2;
    });
    return 0.5 * (s * std::log(ref) + std::log(integral));
}

double weighted_norm(const CounterexampleCase& c) {
    const Bump& chi = unit_bump();
    const double integral = gated(c, "weighted norm", [&](double eta, double xi) {
        const double a = chi(eta) + (xi / c.N) * chi.derivative(eta);
        const double b = (c.t / xi) * chi(eta);
        return a * a + b * b;
    });
    return std::sqrt(integral);
}

double rhs_with_index(const CounterexampleCase& c, double index) {
    const double log_t = std::log(c.t);
    const double log_a = std::log(weighted_norm(c));
    const double log_b = log_hs_norm(c, index, true);
    const double log_h52 = log_hs_norm(c, 2.5, true);
    const double main = std::exp(-0.5 * log_t + (0.5 + c.rho) * log_a + (0.5 - c.rho) * log_b);
    const double tail = std::exp(-0.5 * log_t + log_h52);
    return main + tail;
}

double rhs_original(const CounterexampleCase& c) { return rhs_with_index(c, sobolev_index_original(c.rho)); }

double rhs_corrected(const CounterexampleCase& c) { return rhs_with_index(c, sobolev_index_corrected(c.rho)); }

ScanResult failure_scan(double rho, double N_min, double N_max, int quad_points, unsigned jobs) {
    if (!(rho > 0.0 && rho < 0.5)) throw InvalidArgument("rho must lie in (0, 1/2)");
    if (!(N_min >= 1.0) || N_max < N_min) throw InvalidArgument("scan needs 1 <= N_min <= N_max");
    std::vector<double> Ns;
    for (double N = N_min; N <= N_max * (1.0 + 1e-12); N *= 2.0) Ns.push_back(N);

    ScanResult out;
    out.rows.resize(Ns.size());
    parallel_for(Ns.size(), jobs, [&](std::size_t i) {
        const auto c = CounterexampleCase::make(Ns[i], rho, quad_points);
        ScanRow r;
        r.N = c.N;
        r.rho = rho;
        r.t = c.t;
        r.lhs = lhs(c);
        r.rhs_orig = rhs_original(c);
        r.rhs_corr = rhs_corrected(c);
        r.ratio_orig = r.lhs / r.rhs_orig;
        r.ratio_corr = r.lhs / r.rhs_corr;
        out.rows[i] = r;
    });

    out.predicted_exponent = predicted_original_exponent(rho);
    out.near_degenerate = near_degenerate(rho);
    if (out.rows.size() >= 2) {
        std::vector<double> n, ro, rc;
        for (const auto& r : out.rows) {
            n.push_back(r.N);
            ro.push_back(r.ratio_orig);
            rc.push_back(r.ratio_corr);
        }
        out.original_exponent = loglog_fit(n, ro).slope;
        out.corrected_exponent = loglog_fit(n, rc).slope;
    }
    for (std::size_t i = out.rows.size(); i-- > 0;) {
        if (out.rows[i].ratio_orig <= 1.0) break;
        out.crossing_N = out.rows[i].N;
    }
    out.original_unbounded = out.original_exponent > 0.05 && out.crossing_N.has_value();
    return out;
}

} // namespace spulse
