#pragma once

#include "reslab/arith.hpp"
#include "reslab/resonator.hpp"

#include <cstdint>

namespace reslab::gcdsum {

/// Truncated GCD-sum report.  full/truncated/tail_exact carry the normalized
/// convention (1/|M| in front of the double sum).  tail_bound is the
/// unnormalized display |M| * N^{-2*eta} * prod_{p <= y_M}(1 + 2/(p^{1/2-eta}-1)),
/// so the sharp comparison is K * tail_exact <= tail_bound (tail_ok()); the
/// normalized tail_exact <= tail_bound holds a fortiori.
struct GcdSumReport {
    double full = 0.0;
    double truncated = 0.0;
    double tail_exact = 0.0;
    double tail_bound = 0.0;
    double N = 0.0;
    double eta = 0.0;
    std::uint64_t K = 0;
    std::uint64_t y_M = 0;

    bool tail_ok() const { return static_cast<double>(K) * tail_exact <= tail_bound; }
};

/// (1/|M|) * sum_{m,n in M} sqrt(gcd(m,n)/lcm(m,n)), diagonal included.
/// Compensated summation over a fixed pair order; partial sums are merged in
/// block order, so the result is identical for every worker count.
double gcd_sum(const resonator::IntegerSet& M, unsigned workers = 1);

/// Splits the sum at the truncation [m,n]/(m,n) <= N^2/2: pairs inside
/// contribute to `truncated`, the rest to `tail_exact`; `full` accumulates
/// every pair, so full = truncated + tail_exact up to rounding.
GcdSumReport gcd_sum_truncated(const resonator::IntegerSet& M, double N,
                               unsigned workers = 1);

/// The tail majorant above.  Requires 0 < eta < 1/2 and N >= 1.  y_M (the
/// largest prime factor over M) is computed with `table`; primes up to y_M
/// are sieved internally when table is too small.
double tail_bound(const resonator::IntegerSet& M, double N, double eta,
                  const arith::PrimeTable& table);

/// Largest prime factor over all elements of M.
std::uint64_t largest_prime_over_set(const resonator::IntegerSet& M,
                                     const arith::PrimeTable& table);

/// Growth rate exp(2*sqrt(2) * sqrt(log K * log log log K / log log K)).
/// Requires log log log K > 0, i.e. K > e^e (so K <= 15 is a domain error).
double lemma_rate(std::uint64_t K);

/// #{(a,b) : 1 <= a,b <= N, a*m = b*n}; equals floor(N / max(m/g, n/g)).
std::uint64_t pair_solution_count(std::uint64_t m, std::uint64_t n, double N);

struct ConstructParams {
    std::uint64_t K;             // target cardinality
    std::uint64_t y;             // smoothness bound
    std::uint64_t window_center; // candidates are y-smooth in [center, 2*center]
    std::uint64_t search_budget = 20000; // swap proposals for the local search
    std::uint64_t seed = 1;
};

/// Greedy divisor-rich seed followed by swap-based local search maximizing
/// gcd_sum.  The result is a K-element subset of the y-smooth integers in
/// [window_center, 2*window_center] (hence max <= 2*min).  Deterministic for
/// a fixed seed; throws Infeasible when fewer than K candidates exist.
resonator::IntegerSet construct_candidate_set(const ConstructParams& params,
                                              const arith::PrimeTable& table);

} // namespace reslab::gcdsum
