#pragma once

#include <cstdint>
#include <vector>

namespace reslab::arith {

/// Smallest-prime-factor sieve up to a fixed limit.
class PrimeTable {
public:
    /// Sieves [2, limit].  limit must be >= 2 and small enough to index with
    /// 32 bits (the desk scales this library targets stay far below that).
    explicit PrimeTable(std::uint64_t limit);

    std::uint64_t limit() const { return limit_; }
    const std::vector<std::uint32_t>& primes() const { return primes_; }

    /// Smallest prime factor of n, 2 <= n <= limit.
    std::uint32_t smallest_factor(std::uint64_t n) const;

    bool is_prime(std::uint64_t n) const;

    /// Index of p in primes(), or -1 if p is not a prime <= limit.
    std::int64_t prime_index(std::uint64_t p) const;

private:
    std::uint64_t limit_;
    std::vector<std::uint32_t> spf_;
    std::vector<std::uint32_t> primes_;
};

struct PrimePower {
    std::uint64_t prime;
    std::uint32_t exponent;
};

struct Factorization {
    std::vector<PrimePower> factors; // ascending primes; empty for n = 1

    std::uint64_t value() const;          // reconstructs n
    std::uint32_t big_omega() const;      // Omega(n): exponents summed
    std::uint64_t largest_prime() const;  // P(n); 1 for n = 1
};

/// Factorizes 1 <= n <= table.limit().  n = 1 yields an empty list.
Factorization factorize(std::uint64_t n, const PrimeTable& table);

/// Largest prime factor of n.  Unlike factorize() this also accepts
/// n > table.limit() as long as the cofactor left after removing all prime
/// factors <= limit is prime, which is guaranteed when n <= limit^2.
std::uint64_t largest_prime_factor(std::uint64_t n, const PrimeTable& table);

/// lcm(m, n) with overflow detection (throws std::overflow_error).
std::uint64_t checked_lcm(std::uint64_t m, std::uint64_t n);

/// sqrt(gcd(m,n) / lcm(m,n)) for m, n >= 1.
double gcd_ratio(std::uint64_t m, std::uint64_t n);

/// All integers n <= x whose prime factors all lie in [p_lo, p_hi],
/// generated as products over the admissible primes (never by trial
/// filtering), sorted ascending.  Always contains 1; an empty prime window
/// yields exactly {1}.  Requires x >= 1 and p_hi <= table.limit().
std::vector<std::uint64_t> window_integers(double x, double p_lo, double p_hi,
                                           const PrimeTable& table);

} // namespace reslab::arith
