#pragma once

#include "spulse/grid.hpp"

#include <functional>
#include <vector>

namespace spulse {

/// Smooth even cutoff sigma (1 on |r| <= 1, 0 on |r| >= 2^delta) and the
/// scaled dyadic symbols derived from it. The same profile serves as a
/// frequency symbol and as a spatial window.
class CutoffSpec {
public:
    CutoffSpec(double delta, std::function<double(double)> profile);

    double delta() const { return delta_; }
    double ratio() const { return ratio_; } // 2^delta

    double sigma(double r) const { return profile_(r); }
    /// sigma(r/R) - sigma(2^delta r/R): supported on [R/2^delta, 2^delta R].
    double band(double R, double r) const { return sigma(r / R) - sigma(ratio_ * r / R); }
    double at_most(double R, double r) const { return sigma(r / R); }
    double above(double R, double r) const { return 1.0 - sigma(r / R); }
    double below(double R, double r) const { return sigma(ratio_ * r / R); }
    double between(double lo, double hi, double r) const { return sigma(r / hi) - sigma(ratio_ * r / lo); }

    /// Scaled dyadic 2^{delta m}.
    double dyadic(int m) const;
    /// All m with lo <= 2^{delta m} <= hi.
    std::vector<int> dyadic_range(double lo, double hi) const;
    /// m of the scaled dyadic nearest to r in log scale.
    int nearest_dyadic(double r) const;

private:
    double delta_;
    double ratio_;
    std::function<double(double)> profile_;
};

/// Standard profile: 1 - smoothstep((|r| - 1)/(2^delta - 1)).
CutoffSpec build_cutoff(double delta);

enum class Sign { plus, minus };

Field project_band(const Field& u, double N, const CutoffSpec& spec);
/// Keeps xi > 0 (plus) or xi < 0 (minus). The origin and the unpaired Nyquist
/// mode carry no sign and are dropped by both.
Field project_sign(const Field& u, Sign sign);
/// P^+ composed with the band P_{lo <= . <= hi}.
Field project_plus_between(const Field& u, double lo, double hi, const CutoffSpec& spec);

struct BandParts {
    int m;             // N = 2^{delta m}
    double N;
    Field plus;        // P_N P^+ u
    Field hyp;         // window * plus
    Field ell;         // plus - hyp
    RVec window;       // sigma_N^hyp(t, x_j)
};

struct DecompositionResult {
    double t;
    std::vector<BandParts> bands;
    Field plus;        // P^+ u
    Field hyp;         // sum of band hyperbolic parts
    Field ell;         // plus - hyp
};

/// Hyperbolic window of band N at time t: between(t/(3N^2), 3t/N^2)(x) for x < 0.
double hyperbolic_window(double t, double N, double x, const CutoffSpec& spec);

/// Bands N <= t that meet the grid's positive frequencies.
std::vector<int> decomposition_bands(const Grid& g, double t, const CutoffSpec& spec);

DecompositionResult hyp_ell_decompose(const Field& u, double t, const CutoffSpec& spec, unsigned jobs = 1);

/// A band holding less than this fraction of ||u||_2 counts as empty.
inline constexpr double kDegenerateBandFraction = 1e-12;

struct LocalizationRatio {
    double ratio = 0.0;
    bool degenerate = false; // P_N^+ u vanished; ratio reported as 0
};

/// ||(1 - P^+_{N/2^d <= . <= 2^d N}) |D|^a (|x|^b sigma_R(x) P_N^+ u)||_2
///   / (N^{-c} R^{-a+b-c} ||P_N^+ u||_2)
LocalizationRatio localization_check(const Field& u, double N, double a, double b, double c, double R,
                                     const CutoffSpec& spec);

} // namespace spulse
