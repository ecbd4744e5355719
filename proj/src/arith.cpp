#include "reslab/arith.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace reslab::arith {

PrimeTable::PrimeTable(std::uint64_t limit) : limit_(limit) {
    if (limit < 2) throw std::invalid_argument("PrimeTable: limit must be >= 2");
    if (limit > 0xFFFFFFFFull) throw std::invalid_argument("PrimeTable: limit too large");
    spf_.assign(limit + 1, 0);
    // linear sieve: every composite is crossed off once via its smallest prime
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (spf_[i] == 0) {
            spf_[i] = static_cast<std::uint32_t>(i);
            primes_.push_back(static_cast<std::uint32_t>(i));
        }
        for (std::uint32_t p : primes_) {
            if (p > spf_[i] || i * p > limit) break;
            spf_[i * p] = p;
        }
    }
}

std::uint32_t PrimeTable::smallest_factor(std::uint64_t n) const {
    if (n < 2 || n > limit_) throw std::out_of_range("smallest_factor: n out of range");
    return spf_[n];
}

bool PrimeTable::is_prime(std::uint64_t n) const {
    if (n < 2 || n > limit_) return false;
    return spf_[n] == n;
}

std::int64_t PrimeTable::prime_index(std::uint64_t p) const {
    auto it = std::lower_bound(primes_.begin(), primes_.end(), p);
    if (it == primes_.end() || *it != p) return -1;
    return it - primes_.begin();
}

std::uint64_t Factorization::value() const {
    std::uint64_t v = 1;
    for (const auto& f : factors)
        for (std::uint32_t e = 0; e < f.exponent; ++e) v *= f.prime;
    return v;
}

std::uint32_t Factorization::big_omega() const {
    std::uint32_t s = 0;
    for (const auto& f : factors) s += f.exponent;
    return s;
}

std::uint64_t Factorization::largest_prime() const {
    return factors.empty() ? 1 : factors.back().prime;
}

Factorization factorize(std::uint64_t n, const PrimeTable& table) {
    if (n == 0) throw std::invalid_argument("factorize: n must be >= 1");
    if (n > table.limit()) throw std::out_of_range("factorize: n exceeds sieve limit");
    Factorization out;
    while (n > 1) {
        std::uint32_t p = table.smallest_factor(n);
        std::uint32_t e = 0;
        while (n % p == 0) { n /= p; ++e; }
        out.factors.push_back({p, e});
    }
    return out;
}

std::uint64_t largest_prime_factor(std::uint64_t n, const PrimeTable& table) {
    if (n == 0) throw std::invalid_argument("largest_prime_factor: n must be >= 1");
    if (n <= table.limit()) return factorize(n, table).largest_prime();
    std::uint64_t rest = n;
    std::uint64_t best = 1;
    for (std::uint32_t p : table.primes()) {
        if (static_cast<std::uint64_t>(p) * p > rest) break;
        if (rest % p == 0) {
            best = p;
            while (rest % p == 0) rest /= p;
        }
    }
    if (rest > 1) {
        // no prime <= limit divides rest, so rest is prime iff rest <= limit^2
        if (rest > table.limit() * table.limit())
            throw std::out_of_range("largest_prime_factor: cofactor " + std::to_string(rest) +
                                    " exceeds factorization range of the sieve");
        best = std::max(best, rest);
    }
    return best;
}

std::uint64_t checked_lcm(std::uint64_t m, std::uint64_t n) {
    if (m == 0 || n == 0) throw std::invalid_argument("checked_lcm: arguments must be >= 1");
    std::uint64_t g = std::gcd(m, n);
    std::uint64_t q = m / g, out = 0;
    if (__builtin_mul_overflow(q, n, &out))
        throw std::overflow_error("checked_lcm: lcm(" + std::to_string(m) + ", " +
                                  std::to_string(n) + ") overflows 64 bits");
    return out;
}

double gcd_ratio(std::uint64_t m, std::uint64_t n) {
    std::uint64_t g = std::gcd(m, n);
    std::uint64_t l = checked_lcm(m, n);
    return std::sqrt(static_cast<double>(g) / static_cast<double>(l));
}

namespace {

// Depth-first product generation over the admissible primes; emits every
// product <= cap exactly once.
void window_dfs_powers(std::uint64_t cur, std::size_t idx,
                       const std::vector<std::uint32_t>& ps, std::uint64_t cap,
                       std::vector<std::uint64_t>& out) {
    if (idx == ps.size()) {
        out.push_back(cur);
        return;
    }
    std::uint64_t p = ps[idx];
    std::uint64_t v = cur;
    for (;;) {
        window_dfs_powers(v, idx + 1, ps, cap, out);
        if (v > cap / p) break;
        v *= p;
    }
}

} // namespace

std::vector<std::uint64_t> window_integers(double x, double p_lo, double p_hi,
                                           const PrimeTable& table) {
    if (!(x >= 1.0)) throw std::invalid_argument("window_integers: x must be >= 1");
    if (p_hi > static_cast<double>(table.limit()) + 0.5)
        throw std::invalid_argument("window_integers: window exceeds sieve limit");
    std::uint64_t cap;
    if (x >= 9.2e18) cap = 0xFFFFFFFFFFFFFFFFull;
    else cap = static_cast<std::uint64_t>(std::floor(x));

    std::vector<std::uint32_t> ps;
    for (std::uint32_t p : table.primes()) {
        if (static_cast<double>(p) < p_lo) continue;
        if (static_cast<double>(p) > p_hi) break;
        if (static_cast<std::uint64_t>(p) <= cap) ps.push_back(p);
    }

    std::vector<std::uint64_t> out;
    window_dfs_powers(1, 0, ps, cap, out);
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace reslab::arith
