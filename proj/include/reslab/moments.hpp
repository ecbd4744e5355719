#pragma once

#include "reslab/kernels.hpp"
#include "reslab/multfn.hpp"
#include "reslab/resonator.hpp"

#include <complex>
#include <cstdint>

namespace reslab::moments {

double phi(double t);      // exp(-t^2/2)
double phi_hat(double xi); // its Fourier transform sqrt(2*pi) * exp(-xi^2/2)

/// Pair-sum terms whose phi_hat argument exceeds this are skipped;
/// phi_hat(12) < 1.4e-31 and the discarded mass is bounded and reported.
inline constexpr double kPhiHatCutoff = 12.0;

/// Conventions.  All moment quantities are stored in "bare integral" units,
/// i.e. as values of int ... dt with no prefactor; multiplying by
/// log T / T yields the prefactored convention.  prefactor = T / log T is
/// recorded so either normalization can be reconstructed.  The lower bounds
/// m2/m1 are invariant under the choice as long as both sides match, which
/// the report guarantees.

/// Kernel series S(t) = sum over the support of f(n) r(n) n^{it}.
kernels::PhaseSeries resonator_series(const resonator::Resonator& R,
                                      const multfn::CMFunction& f);

/// Kernel series S_t(N) = sum_{n <= N} f(n) n^{it}.
kernels::PhaseSeries poly_series(const multfn::CMFunction& f, std::uint64_t N);

struct I1Result {
    double diag_coeff = 0.0;    // sum_m r(m)^2
    double offdiag_coeff = 0.0; // sum_{m != n} Re f(m)conj(f(n)) r(m)r(n) phi_hat(...)
    double discarded = 0.0;     // bound on the skipped off-diagonal mass

    double i1(double prefactor) const;
    double diag_i1(double prefactor) const;
    double offdiag_i1(double prefactor) const;
};

/// Exact pair sum for I1 = int_R |R(t)|^2 Phi(t log T/T) dt (in bare units,
/// i1(T/log T)).  Pairs are pruned by the phi_hat cutoff via a sorted sweep.
I1Result i1_pairsum(const resonator::Resonator& R, const multfn::CMFunction& f,
                    double T, unsigned workers = 1);

struct QuadResult {
    double value = 0.0;
    double achieved_rel = 0.0;
    bool converged = true;
    std::uint64_t points = 0;
};

/// (log T / T) * int_R |R(t)|^2 Phi(t log T / T) dt by adaptive quadrature:
/// the independent cross-check of i1_pairsum.  The returned value carries
/// the (log T / T)-prefactored normalization, i.e. it equals
/// i1_pairsum(...).i1(T/log T) * (log T / T) up to quadrature error.
QuadResult i1_quadrature(const resonator::Resonator& R, const multfn::CMFunction& f,
                         double T, double rel_tol, unsigned workers = 1);

struct I2Result {
    /// Raw diagonal coefficient sum (no phi_hat(0), no prefactor):
    /// thm11: sum_{k<=N} sum_{m: km in supp} r(m) r(km);
    /// thm12: sum_v |sum_{(a,n): a*n = v} f(a) r(n)|^2.
    double diag_coeff = 0.0;
    std::complex<double> offdiag_coeff{0.0, 0.0}; // with phi_hat factors
    double discarded = 0.0;
    std::uint64_t terms = 0;

    std::complex<double> i2(double prefactor) const;
    std::complex<double> offdiag_i2(double prefactor) const;
};

/// Exact triple sum sum_{k<=N} sum_{m,n in supp} f(km) conj(f(n)) r(m) r(n)
/// phi_hat((T/log T) log(km/n)); bare units via i2(T/log T).  Refuses with a
/// size estimate when N * |supp|^2 exceeds `budget`.
I2Result i2_thm11(const resonator::Resonator& R, const multfn::CMFunction& f,
                  double T, double N, double budget = 1e9, unsigned workers = 1);

/// Exact quadruple pair sum for the second moment with |S_t(N)|^2:
/// entries (a, n) with value a*n, weight r(n), phase arg f(a), paired within
/// the phi_hat cutoff.  Real up to the Hermitian pairing.
I2Result i2_thm12(const resonator::Resonator& R, const multfn::CMFunction& f,
                  double T, double N, double budget = 1e9, unsigned workers = 1);

/// int_{1<=|t|<=T} |S_t(N)|^2 |R(t)|^2 Phi(t log T/T) dt by adaptive Simpson
/// over [1, T] and [-T, -1] (bare units): the independent cross-check of
/// i2_thm12.  Uses the t -> -t symmetry when f is real-valued.
QuadResult m2_thm12_grid(const resonator::Resonator& R, const multfn::CMFunction& f,
                         double T, double N, double rel_tol = 1e-8,
                         unsigned workers = 1);

enum class Style { thm11, thm12 };

struct MomentReport {
    Style style = Style::thm11;
    double T = 0.0, N = 0.0;
    double prefactor = 0.0; // T / log T

    // bare integral units throughout (see conventions note above)
    double i1 = 0.0, diag_i1 = 0.0, offdiag_i1 = 0.0;
    double m1 = 0.0;
    double diag_i2 = 0.0; // raw coefficient sum (see I2Result)
    std::complex<double> i2{0.0, 0.0};
    std::complex<double> offdiag_i2{0.0, 0.0};
    std::complex<double> m2{0.0, 0.0};

    // numerically computed window corrections: m1 = i1 - gap1_small - gap1_outer
    double gap1_small = 0.0, gap1_outer = 0.0;
    std::complex<double> gap2_small{0.0, 0.0}, gap2_outer{0.0, 0.0};

    // honest-slack accounting
    double err_m1 = 0.0, err_m2 = 0.0;
    double lower_bound = 0.0;     // thm11: |m2|/m1; thm12: sqrt(m2/m1)
    double lower_bound_low = 0.0; // same with numerical slack folded in
    std::uint64_t quad_points = 0;
    double achieved_rel = 0.0; // worst over the quadratures involved
};

/// max |S_t(N)| lower bound from a report: |m2|/m1 for thm11,
/// sqrt(Re m2/m1) for thm12.  Throws std::domain_error when m1 <= 0.
double lower_bound(const MomentReport& rep);

MomentReport report_thm11(const resonator::Resonator& R, const multfn::CMFunction& f,
                          double T, double N, double rel_tol = 1e-9,
                          double budget = 1e9, unsigned workers = 1);

MomentReport report_thm12(const resonator::Resonator& R, const multfn::CMFunction& f,
                          double T, double N, double rel_tol = 1e-8,
                          double budget = 1e9, unsigned workers = 1);

} // namespace reslab::moments
