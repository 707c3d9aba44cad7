#pragma once

#include "spulse/grid.hpp"
#include "spulse/lp.hpp"
#include "spulse/snapshot.hpp"
#include "spulse/spectral.hpp"

#include <vector>

namespace spulse {

inline constexpr double kDefaultSobolevIndex = 4.5;
/// Fraction of the box, split evenly between both ends, over which x-weights ramp to 0.
inline constexpr double kSeamTaperFraction = 0.02;
/// Fraction of the box, split evenly between both ends, watched by the wrap monitor.
inline constexpr double kWrapEdgeFraction = 0.05;

/// Smooth ramp from 1 to 0 across the outer kSeamTaperFraction of the box.
double seam_taper(const Grid& g, double x);

/// J d_x u = x u_x - t d_x^{-1} u, with the x weight tapered at the seam.
Field j_field(const Field& u, double t, double mean_tol = kDefaultMeanTol);
Field j_field(const Snapshot& s);

/// J_+ w = sqrt|x| w - i sqrt(t) d_x^{-1} w, sqrt|x| tapered at the seam.
Field jplus_field(double t, const Field& target, double mean_tol = kDefaultMeanTol);
Field jplus_field(const Snapshot& s, const Field& target);

/// S u = -t d_x(u^p) + J d_x u - u, using the equation for the time derivative.
Field s_field(const Field& u, double t, int p = 3);
Field s_field(const Snapshot& s, int p = 3);

double hs_norm(const SpectralField& c, double s);
double hm1_norm(const SpectralField& c);
/// L2 mass fraction in |x| >= (1 - edge_fraction) L/2.
double wrap_fraction(const Field& u, double edge_fraction = kWrapEdgeFraction);

NormRecord compute_norms(const Field& u, double t, double s, int p = 3, double mean_tol = kDefaultMeanTol);
/// X^s norm accumulated in one pass over Fourier coefficients.
double xs_norm_fourier(const Field& u, double t, double s, double mean_tol = kDefaultMeanTol);

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;   // RMS deviation of log y from the fit
    std::size_t samples = 0;
};

/// Least squares fit of log y against log x over all samples (at least 2, all positive).
FitResult loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

/// Least squares fit of log y against log t over samples with t in [t_lo, t_hi].
FitResult decay_fit(const std::vector<double>& t, const std::vector<double>& y, double t_lo, double t_hi);

struct ScalingResult {
    double ratio = 0.0;
    bool degenerate = false;
};

/// Q(u,t) / Q(u_lambda, lambda t) with Q = t^{1/2}||u_x||_inf / (||u||_{H^4 hom}^{1/2} ||J d_x u||^{1/2})
/// and u_lambda the samples of u / lambda on the box shrunk by lambda.
ScalingResult scaling_selftest(const Field& u, double t, int lambda);

/// (sum_N ||P_N u||_{X^s}^2)^{1/2} / ||u||_{X^s} over bands covering the grid spectrum.
double band_norm_equivalence(const Field& u, double t, double s, const CutoffSpec& spec, unsigned jobs = 1);

} // namespace spulse
