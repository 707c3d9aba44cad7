#pragma once

#include <optional>
#include <vector>

namespace spulse {

/// phi = F^{-1}[chi((xi - 2N)/N)] with chi the unit bump on [-1, 1], probed at
/// t = N^{2 + 1/(2 rho)}. All norms are 1-D quadratures over xi in [N, 3N].
struct CounterexampleCase {
    double N = 16.0;
    double rho = 0.25;
    double t = 0.0;
    int quad_points = 4096;

    static CounterexampleCase make(double N, double rho, int quad_points = 4096);
};

double sobolev_index_original(double rho);  // (2 - 2 rho)/(1 - 2 rho)
double sobolev_index_corrected(double rho); // (4 - 2 rho)/(1 - 2 rho)
/// Growth exponent of lhs/rhs_original predicted from the two right-hand terms:
/// 2 - max(3/2, 2 - 1/(4 rho)).
double predicted_original_exponent(double rho);
/// True when the two right-hand terms grow at rates within 0.05 of each other.
bool near_degenerate(double rho);

/// sup over |x| <= extent/N of |d_x phi|, sampled at `points` nodes (x = 0 included).
double lhs(const CounterexampleCase& c, double extent = 10.0, int points = 4097);

/// log ||phi||_{H^s}; with apply_flow the unit-modulus factor e^{it/xi} is
/// multiplied in before the modulus is taken.
double log_hs_norm(const CounterexampleCase& c, double s, bool apply_flow = false);
/// ||x d_x U(-t) phi||_2
double weighted_norm(const CounterexampleCase& c);

/// Throw QuadratureUnderResolved if doubling the panels moves the value by > 1e-8 relative.
double rhs_original(const CounterexampleCase& c);
double rhs_corrected(const CounterexampleCase& c);
/// Shared form t^{-1/2} A^{1/2+rho} ||phi||_{H^index}^{1/2-rho} + t^{-1/2} ||phi||_{H^{5/2}}.
double rhs_with_index(const CounterexampleCase& c, double index);

struct ScanRow {
    double N = 0.0;
    double rho = 0.0;
    double t = 0.0;
    double lhs = 0.0;
    double rhs_orig = 0.0;
    double rhs_corr = 0.0;
    double ratio_orig = 0.0;
    double ratio_corr = 0.0;
};

struct ScanResult {
    std::vector<ScanRow> rows;
    double original_exponent = 0.0;
    double corrected_exponent = 0.0;
    double predicted_exponent = 0.0;
    bool near_degenerate = false;
    bool original_unbounded = false;
    std::optional<double> crossing_N; // first N from which lhs/rhs_original stays above 1
};

/// Cases N = N_min, 2 N_min, ..., N_max.
ScanResult failure_scan(double rho, double N_min, double N_max, int quad_points = 4096, unsigned jobs = 1);

} // namespace spulse
