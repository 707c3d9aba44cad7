#pragma once

#include "spulse/grid.hpp"

#include <optional>

namespace spulse {

struct NormRecord {
    double t = 0.0;
    double s = 0.0;        // Sobolev index used for hs and xs
    double l2 = 0.0;
    double hs = 0.0;
    double hm1 = 0.0;      // homogeneous H^{-1}, origin excluded
    double jdx_l2 = 0.0;   // ||J d_x u||_2
    double xs = 0.0;       // sqrt(hs^2 + hm1^2 + jdx_l2^2)
    double linf = 0.0;
    double ux_linf = 0.0;
    double su_l2 = 0.0;
    double wrapfrac = 0.0; // L2 mass fraction in the outer 5% of the box
};

/// Rate check of d/dt ||u_x||^2 against 6 * integral(u u_x^3) at one instant.
struct H1RateCheck {
    double fd_rate = 0.0;
    double quadrature_rate = 0.0;
    double rel_error = 0.0;
};

struct Snapshot {
    double t;
    Field u;
    Field ux;
    Field inv;             // d_x^{-1} u
    NormRecord norms;
    std::optional<H1RateCheck> h1;
};

/// Builds the cached derived fields and the norm record of a real zero-mean u.
Snapshot make_snapshot(const Field& u, double t, double s, int p, double mean_tol);

} // namespace spulse
