#pragma once

#include "spulse/lp.hpp"
#include "spulse/snapshot.hpp"

namespace spulse {

/// Empirical constants of the pointwise and weighted decay bounds at one time.
/// Each entry is sup (or L2 norm) of the field divided by its predicted
/// envelope times ||u||_{X^s}; bounded ratios with no upward trend are the
/// testable content.
struct DecayMonitors {
    double t = 0.0;
    double hyp = 0.0;      // |u^{hyp,+}| vs t^{-1/2} min((|x|/t)^{s/4-1/2}, (|x|/t)^{-3/4})
    double hyp_x = 0.0;    // |d_x u^{hyp,+}| vs t^{-1/2} min((|x|/t)^{s/4-1}, (|x|/t)^{-5/4})
    double ell = 0.0;      // |2 Re u^{ell,+}| vs t^{-(2s-1)/(2s+2)} (1 + log t)
    double ell_x = 0.0;    // its derivative vs t^{-(2s-3)/(2s+2)} (1 + log t)
    double weighted = 0.0; // ||sqrt|x| J_+ d_x u^{hyp,+}||_2
};

/// Requires t >= 1. A zero snapshot gives all-zero ratios.
DecayMonitors decay_monitors(const Snapshot& s, const CutoffSpec& spec, unsigned jobs = 1);

} // namespace spulse
