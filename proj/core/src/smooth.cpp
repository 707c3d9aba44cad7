#include "spulse/smooth.hpp"

#include "spulse/errors.hpp"

#include <cmath>

namespace spulse {

double glue(double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; }

double smoothstep(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    const double a = glue(s);
    const double b = glue(1.0 - s);
    return a / (a + b);
}

namespace {

double raw_bump(double u) {
    const double q = 1.0 - u * u;
    return q > 0.0 ? std::exp(-1.0 / q) : 0.0;
}

} // namespace

Bump::Bump(double half_width) : a_(half_width), norm_(1.0) {
    if (!(half_width > 0.0)) throw InvalidArgument("bump half-width must be positive");
    // Trapezoid on a compactly supported C-infinity integrand converges faster
    // than any power; 2^12 panels is far past round-off.
    const int panels = 1 << 12;
    const double h = 2.0 / panels;
    double sum = 0.0;
    for (int i = 1; i < panels; ++i) sum += raw_bump(-1.0 + i * h);
    norm_ = 1.0 / (sum * h * a_);
}

double Bump::operator()(double y) const { return norm_ * raw_bump(y / a_); }

double Bump::derivative(double y) const {
    const double u = y / a_;
    const double q = 1.0 - u * u;
    if (q <= 0.0) return 0.0;
    return norm_ * std::exp(-1.0 / q) * (-2.0 * u / (q * q)) / a_;
}

} // namespace spulse
