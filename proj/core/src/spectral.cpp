#include "spulse/spectral.hpp"

#include "spulse/errors.hpp"
#include "spulse/fft.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

namespace spulse {
namespace {

constexpr std::size_t kSupPeakLimit = 16;
const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

double alternating(std::size_t slot) { return (slot & 1u) ? -1.0 : 1.0; }

} // namespace

namespace symbols {

Symbol identity() { return {[](double) { return cplx(1.0, 0.0); }, cplx(1.0, 0.0), true}; }

Symbol derivative() { return {[](double xi) { return cplx(0.0, xi); }, cplx(0.0, 0.0), true}; }

Symbol antiderivative() { return {[](double xi) { return cplx(0.0, -1.0 / xi); }, cplx(0.0, 0.0), true}; }

Symbol japanese_power(double s) {
    return {[s](double xi) { return cplx(std::pow(1.0 + xi * xi, 0.5 * s), 0.0); }, cplx(1.0, 0.0), true};
}

Symbol abs_power(double a) {
    return {[a](double xi) { return cplx(std::pow(std::abs(xi), a), 0.0); }, cplx(a == 0.0 ? 1.0 : 0.0, 0.0),
            true};
}

Symbol free_flow(double t) {
    return {[t](double xi) { return std::polar(1.0, -t / xi); }, cplx(1.0, 0.0), true};
}

} // namespace symbols

SpectralField forward_transform(const Field& f) {
    const Grid& g = f.grid();
    const std::size_t n = g.n();
    CVec out(n);
    fft::forward(f.values().data(), out.data(), n);
    const double scale = g.dx() * kInvSqrt2Pi;
    for (std::size_t k = 0; k < n; ++k) out[k] *= scale * alternating(k);
    return SpectralField(g, std::move(out), f.kind());
}

Field inverse_transform(const SpectralField& c) {
    const Grid& g = c.grid();
    const std::size_t n = g.n();
    CVec in(n), out(n);
    const double scale = g.dxi() * kInvSqrt2Pi;
    for (std::size_t k = 0; k < n; ++k) in[k] = c[k] * (scale * alternating(k));
    fft::backward(in.data(), out.data(), n);
    if (c.kind() == Kind::real)
        for (auto& v : out) v = cplx(v.real(), 0.0);
    return Field(g, std::move(out), c.kind());
}

SpectralField apply_multiplier(const SpectralField& c, const Symbol& m, double zero_tol) {
    const Grid& g = c.grid();
    const std::size_t n = g.n();
    double cmax = 0.0;
    for (const auto& v : c.coeffs()) cmax = std::max(cmax, std::abs(v));
    const double populated = zero_tol * cmax;

    CVec out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const cplx ck = c[k];
        cplx mk;
        if (k == 0) {
            mk = m.at_zero;
        } else {
            mk = m.fn(g.xi(k));
            if (m.hermitian && c.kind() == Kind::real && k == g.nyquist_slot()) mk = cplx(mk.real(), 0.0);
        }
        if (!std::isfinite(mk.real()) || !std::isfinite(mk.imag())) {
            if (std::abs(ck) > populated)
                throw NonFiniteSymbol("symbol is not finite at xi = " + std::to_string(g.xi(k)) +
                                      " where the coefficient is nonzero");
            out[k] = 0.0;
            continue;
        }
        out[k] = mk * ck;
    }
    const Kind kind = (c.kind() == Kind::real && m.hermitian) ? Kind::real : Kind::complex;
    return SpectralField(g, std::move(out), kind);
}

Field apply_multiplier(const Field& f, const Symbol& m, double zero_tol) {
    return inverse_transform(apply_multiplier(forward_transform(f), m, zero_tol));
}

bool has_zero_mean(const Field& f, double mean_tol) {
    cplx sum = 0.0;
    for (const auto& v : f.values()) sum += v;
    const double c0 = std::abs(sum) * f.grid().dx() * kInvSqrt2Pi;
    return c0 <= mean_tol * l2_norm(f);
}

void require_zero_mean(const Field& f, double mean_tol, const char* what) {
    if (!has_zero_mean(f, mean_tol))
        throw MeanNotZero(std::string(what) + ": field mean exceeds mean_tol * ||f||_2");
}

Field derivative(const Field& f) { return apply_multiplier(f, symbols::derivative()); }

Field antiderivative(const Field& f, double mean_tol) {
    require_zero_mean(f, mean_tol, "antiderivative");
    return apply_multiplier(f, symbols::antiderivative());
}

Field free_propagate(const Field& f, double t, double mean_tol) {
    require_zero_mean(f, mean_tol, "free_propagate");
    if (t == 0.0) return f;
    return apply_multiplier(f, symbols::free_flow(t));
}

Field pointwise(const Field& f, const std::function<cplx(double)>& weight, Kind kind) {
    const Grid& g = f.grid();
    CVec out(g.n());
    for (std::size_t j = 0; j < g.n(); ++j) out[j] = f[j] * weight(g.x(j));
    return Field(g, std::move(out), kind);
}

Field scale(const Field& f, cplx a) {
    CVec out(f.values());
    for (auto& v : out) v *= a;
    const Kind kind = (f.is_real() && a.imag() == 0.0) ? Kind::real : Kind::complex;
    return Field(f.grid(), std::move(out), kind);
}

Field add(const Field& a, const Field& b) {
    if (!(a.grid() == b.grid())) throw InvalidArgument("add: grid mismatch");
    CVec out(a.values());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += b[j];
    return Field(a.grid(), std::move(out), a.is_real() && b.is_real() ? Kind::real : Kind::complex);
}

Field subtract(const Field& a, const Field& b) {
    if (!(a.grid() == b.grid())) throw InvalidArgument("subtract: grid mismatch");
    CVec out(a.values());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] -= b[j];
    return Field(a.grid(), std::move(out), a.is_real() && b.is_real() ? Kind::real : Kind::complex);
}

double l2_norm(const Field& f) {
    double s = 0.0;
    for (const auto& v : f.values()) s += std::norm(v);
    return std::sqrt(s * f.grid().dx());
}

double linf_norm(const Field& f) {
    double m = 0.0;
    for (const auto& v : f.values()) m = std::max(m, std::abs(v));
    return m;
}

double sup_norm(const Field& f) {
    const Grid& g = f.grid();
    const std::size_t n = g.n();
    const double top = linf_norm(f);
    if (top == 0.0) return 0.0;
    std::vector<std::pair<double, std::size_t>> peaks;
    for (std::size_t j = 0; j < n; ++j) {
        const double a = std::abs(f[j]);
        if (a >= 0.95 * top && a >= std::abs(f[(j + n - 1) % n]) && a >= std::abs(f[(j + 1) % n]))
            peaks.emplace_back(a, j);
    }
    std::sort(peaks.begin(), peaks.end(), std::greater<>());
    if (peaks.size() > kSupPeakLimit) peaks.resize(kSupPeakLimit);

    const SpectralField c = forward_transform(f);
    const auto neg_abs = [&c](double x) { return -std::abs(interpolate(c, x)); };
    double best = top;
    for (const auto& [a, j] : peaks) {
        const auto r = boost::math::tools::brent_find_minima(neg_abs, g.x(j) - g.dx(), g.x(j) + g.dx(),
                                                             std::numeric_limits<double>::digits / 2);
        best = std::max(best, -r.second);
    }
    return best;
}

double l2_norm(const SpectralField& c) {
    double s = 0.0;
    for (const auto& v : c.coeffs()) s += std::norm(v);
    return std::sqrt(s * c.grid().dxi());
}

cplx inner(const Field& a, const Field& b) {
    if (!(a.grid() == b.grid())) throw InvalidArgument("inner: grid mismatch");
    cplx s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * std::conj(b[j]);
    return s * a.grid().dx();
}

cplx interpolate(const SpectralField& c, double x) {
    const Grid& g = c.grid();
    const std::size_t n = g.n();
    cplx sum = 0.0;
    // Positive and negative modes share one rotation each; the Nyquist mode
    // enters as a cosine so real data interpolate to real values.
    const cplx step = std::polar(1.0, x * g.dxi());
    cplx rot = 1.0;
    for (std::size_t k = 0; k < n / 2; ++k) {
        sum += c[k] * rot;
        if (k > 0) sum += c[n - k] * std::conj(rot);
        rot *= step;
        if ((k & 63u) == 63u) rot = std::polar(1.0, x * g.dxi() * static_cast<double>(k + 1));
    }
    sum += c[n / 2] * std::cos(x * g.xi(n / 2));
    cplx value = sum * (g.dxi() * kInvSqrt2Pi);
    if (c.kind() == Kind::real) value = cplx(value.real(), 0.0);
    return value;
}

} // namespace spulse
