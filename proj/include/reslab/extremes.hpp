#pragma once

#include "reslab/moments.hpp"
#include "reslab/multfn.hpp"
#include "reslab/resonator.hpp"
#include "reslab/tgrid.hpp"

#include <complex>
#include <cstdint>

namespace reslab::extremes {

/// S_t(N) = sum_{n <= N} f(n) n^{it}, evaluated directly (one sin/cos per
/// term).  Used for spot checks and refinement, not for grid scans.
std::complex<double> eval_poly(const multfn::CMFunction& f, std::uint64_t N, double t);

struct MaxResult {
    double t = 0.0;             // refined argmax
    double value = 0.0;         // |S_t(N)| there
    double grid_t = 0.0;        // best grid point
    double grid_value = 0.0;    // |S| there, re-evaluated directly
    double certified_gap = 0.0; // sup over the range <= value + certified_gap
    std::uint64_t grid_points = 0;
    bool certified = true; // false when max_points forced a coarser grid
};

/// Deterministic grid scan of |S_t(N)| over the grid's range, followed by
/// golden-section refinement around the best grid point.  The gap bound is
/// (h/2) * sum_{n<=N} log n plus a rounding-drift allowance, so
/// sup |S| <= value + certified_gap holds unconditionally.
MaxResult find_max(const multfn::CMFunction& f, std::uint64_t N, const TGrid& grid,
                   unsigned workers = 1,
                   std::uint64_t max_points = (std::uint64_t{1} << 28));

struct CertifyResult {
    moments::MomentReport report;
    MaxResult forward;  // t in [1, T]
    MaxResult backward; // t in [-T, -1], scanned as conj(f)
    double observed = 0.0;      // max of the two refined values
    double covered_upper = 0.0; // certified upper bound for the two-sided max
    double bound = 0.0;         // moment lower bound
    double bound_low = 0.0;     // same, with the numerical slack subtracted
    bool pass = false;          // covered_upper >= bound_low
};

/// Full pipeline: moment report, two-sided observed maximum over
/// 1 <= |t| <= T, and the consistency verdict
///     observed + certified gap >= moment bound - numerical slack.
/// The t < 0 side is scanned as conj(f) since |S_{-t}[f]| = |S_t[conj f]|.
CertifyResult certify_resonance(moments::Style style, const resonator::Resonator& R,
                                const multfn::CMFunction& f, double T, double N,
                                double tolerance = 1e-2, double rel_tol = 1e-8,
                                double budget = 1e9, unsigned workers = 1,
                                std::uint64_t max_points = (std::uint64_t{1} << 28));

/// Exponential integral E_1(x) = int_x^inf e^{-u}/u du, x > 0.
/// Power series for x <= 1, modified Lentz continued fraction beyond.
double e1(double x);

/// Solves E_1(A) = y for A in [1e-8, 50]; throws std::domain_error when y
/// falls outside [E_1(50), E_1(1e-8)].
double e1_inverse(double y);

/// tau'(A) = exp(-A)/A - E_1(A).
double tau_prime(double A);

struct Prediction {
    double value = 0.0; // sqrt(N) * exp(exponent)
    double exponent = 0.0;
    double tau = 0.0, A = 0.0, tau_p = 0.0; // thm11 internals, else zero
};

/// sqrt(N) * exp(A * (tau + tau'(A)) * sqrt(log T / log log T)) with
/// tau = log N / sqrt(log T * log log T) and A = E_1^{-1}(tau).
/// Lower-order terms are dropped, so this is an asymptotic shape, not a
/// certified bound.
Prediction predict_thm11(double T, double N);

/// sqrt(N) * exp(sqrt(2 * L1 * L3 / L2)) with L1 = log(T/N), L2 = log L1,
/// L3 = log L2; requires T/N > e^e so that L3 > 0.
Prediction predict_thm12(double T, double N);

/// sqrt(N) * exp(sqrt((1 - delta) * log T / log log T)).
Prediction predict_xy(double T, double N, double delta);

/// The window exp((log T)^{1/2+delta}) <= N <= sqrt(T) in which the xy
/// prediction applies.
bool xy_range_ok(double T, double N, double delta);

} // namespace reslab::extremes
