#pragma once

#include "spulse/grid.hpp"
#include "spulse/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

namespace testing_support {

using spulse::cplx;
using spulse::Field;
using spulse::Grid;

inline constexpr double kPi = std::numbers::pi;

inline double max_abs_diff(const Field& a, const Field& b) {
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

inline double max_abs_diff(const Field& a, const std::function<cplx(double)>& f) {
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - f(a.grid().x(j))));
    return m;
}

inline Field gaussian_derivative(const Grid& g, double eps = 1.0, double w = 1.0) {
    return Field::sample(
        g, [=](double x) { return -2.0 * eps * (x / w) / w * std::exp(-(x / w) * (x / w)); }, spulse::Kind::real);
}

/// Real band-limited field: random cosines/sines on modes 1..kmax with a fixed seed.
inline Field random_bandlimited(const Grid& g, int kmax, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    std::vector<double> a(kmax + 1), b(kmax + 1);
    for (int k = 1; k <= kmax; ++k) {
        a[k] = nd(rng);
        b[k] = nd(rng);
    }
    return Field::sample(
        g,
        [&](double x) {
            double s = 0.0;
            for (int k = 1; k <= kmax; ++k) {
                const double th = g.dxi() * k * x;
                s += a[k] * std::cos(th) + b[k] * std::sin(th);
            }
            return s;
        },
        spulse::Kind::real);
}

/// O(n^2) continuum-normalized DFT used as an independent oracle.
inline std::vector<cplx> naive_dft(const Field& f) {
    const Grid& g = f.grid();
    const std::size_t n = g.n();
    std::vector<cplx> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        cplx s{};
        for (std::size_t j = 0; j < n; ++j) s += f[j] * std::polar(1.0, -g.x(j) * g.xi(k));
        out[k] = s * g.dx() / std::sqrt(2.0 * kPi);
    }
    return out;
}

} // namespace testing_support
