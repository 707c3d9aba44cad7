#pragma once

#include "spulse/grid.hpp"

#include <functional>

namespace spulse {

inline constexpr double kDefaultMeanTol = 1e-10;

/// Fourier multiplier m(xi). The value at xi = 0 is never obtained from `fn`;
/// it is always `at_zero`. A hermitian symbol (m(-xi) = conj m(xi)) maps real
/// fields to real fields; on the unpaired Nyquist mode of a real field such a
/// symbol acts by Re m so that the symmetry survives.
struct Symbol {
    std::function<cplx(double)> fn;
    cplx at_zero{0.0, 0.0};
    bool hermitian = true;
};

namespace symbols {
Symbol identity();
Symbol derivative();                 // i xi
Symbol antiderivative();             // 1/(i xi), 0 at the origin
Symbol japanese_power(double s);     // <xi>^s
Symbol abs_power(double a);          // |xi|^a, 0 at the origin unless a == 0
Symbol free_flow(double t);          // e^{t/(i xi)}, 1 at the origin
} // namespace symbols

SpectralField forward_transform(const Field& f);
Field inverse_transform(const SpectralField& c);

/// c_k -> m(xi_k) c_k. Coefficients with |c_k| <= zero_tol * max|c| are
/// treated as unpopulated: a non-finite symbol there yields 0 instead of an error.
SpectralField apply_multiplier(const SpectralField& c, const Symbol& m, double zero_tol = 0.0);
Field apply_multiplier(const Field& f, const Symbol& m, double zero_tol = 0.0);

bool has_zero_mean(const Field& f, double mean_tol = kDefaultMeanTol);
/// Throws MeanNotZero unless |c_0| <= mean_tol * ||f||_2.
void require_zero_mean(const Field& f, double mean_tol, const char* what);

Field derivative(const Field& f);
Field antiderivative(const Field& f, double mean_tol = kDefaultMeanTol);
Field free_propagate(const Field& f, double t, double mean_tol = kDefaultMeanTol);

/// Pointwise product with a weight w(x) sampled at the nodes.
Field pointwise(const Field& f, const std::function<cplx(double)>& weight, Kind kind);
Field scale(const Field& f, cplx a);
Field add(const Field& a, const Field& b);
Field subtract(const Field& a, const Field& b);

double l2_norm(const Field& f);
double linf_norm(const Field& f);
/// sup |f| of the band-limited interpolant: node peaks within 5% of the
/// largest are refined by Brent's method over their neighbouring cells.
double sup_norm(const Field& f);
double l2_norm(const SpectralField& c);
/// sum_j a_j conj(b_j) dx
cplx inner(const Field& a, const Field& b);

/// Band-limited (trigonometric) interpolation of f at an arbitrary point.
cplx interpolate(const SpectralField& c, double x);

} // namespace spulse
