#pragma once

namespace spulse {

/// e^{-1/s} for s > 0, else 0.
double glue(double s);

/// C-infinity step: 0 for s <= 0, 1 for s >= 1, strictly monotone between.
double smoothstep(double s);

/// Normalized bump chi(y) = c * exp(-1/(1 - (y/a)^2)) on |y| < a, with c
/// chosen so that the integral of chi is 1.
class Bump {
public:
    explicit Bump(double half_width);

    double half_width() const { return a_; }
    double operator()(double y) const;
    double derivative(double y) const;
    /// Integral of |chi|; equal to 1 since chi >= 0, kept for the gamma bound.
    double abs_integral() const { return 1.0; }
    double peak() const { return (*this)(0.0); }

private:
    double a_;
    double norm_;
};

} // namespace spulse
