#pragma once

#include "reslab/arith.hpp"

#include <complex>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

namespace reslab::multfn {

/// Completely multiplicative unimodular function, stored as one angle per
/// prime: f(p) = exp(i*theta_p).  Unimodularity is exact by construction;
/// f(n) is evaluated by summing prime angles, never by multiplying values.
class CMFunction {
public:
    /// angles[i] is theta for table->primes()[i]; it may be shorter than the
    /// prime list (missing entries behave as 0, i.e. f(p) = 1).
    CMFunction(std::shared_ptr<const arith::PrimeTable> table,
               std::vector<double> angles);

    std::uint64_t domain_limit() const { return table_->limit(); }
    const arith::PrimeTable& table() const { return *table_; }
    std::shared_ptr<const arith::PrimeTable> table_ptr() const { return table_; }
    const std::vector<double>& prime_angles() const { return angles_; }

    /// theta_p for prime p <= domain_limit (0 if p is not prime).
    double angle_at_prime(std::uint64_t p) const;

    /// arg f(n) as the exact sum of prime angles (not reduced mod 2*pi).
    double angle(std::uint64_t n) const;

    std::complex<double> evaluate(std::uint64_t n) const;

    /// True when every value f(n) is real, i.e. all angles are 0 or pi.
    bool real_valued() const;

    CMFunction conjugated() const;

private:
    std::shared_ptr<const arith::PrimeTable> table_;
    std::vector<double> angles_;
};

/// Minimal-enclosing-arc diagnostics for the values f(n), n <= N, on the
/// unit circle.
struct ArcReport {
    double width = 0.0;       // width of the minimal arc containing all values
    double min_pair_re = 1.0; // min over pairs of Re f(n) * conj(f(m))
    std::pair<std::uint64_t, std::uint64_t> witness; // pair attaining the min
};

struct FcResult {
    ArcReport arc;
    bool member = false; // width <= arccos(c)
};

/// Checks membership of f in the truncated class F(c): Re f(n)conj(f(m)) >= c
/// for all m, n <= N.  Requires N >= 1, N <= f.domain_limit(), c in (0, 1).
FcResult check_fc(const CMFunction& f, std::uint64_t N, double c);

enum class SampleKind { constant_one, random_unimodular, arc_constrained };

CMFunction sample_constant_one(std::shared_ptr<const arith::PrimeTable> table);

/// theta_p independent uniform on (-pi, pi], deterministic in the seed.
CMFunction sample_random_unimodular(std::shared_ptr<const arith::PrimeTable> table,
                                    std::uint64_t seed);

/// theta_p uniform on [0, arccos(c) / max(1, floor(log2 N))]; by construction
/// every f(n) with n <= N lies inside an arc of width arccos(c), hence the
/// sample is a member of the truncated class F(c).
CMFunction sample_arc_constrained(std::shared_ptr<const arith::PrimeTable> table,
                                  double c, std::uint64_t N, std::uint64_t seed);

CMFunction sample(SampleKind kind, std::shared_ptr<const arith::PrimeTable> table,
                  std::uint64_t seed, double c = 0.5, std::uint64_t N = 2);

} // namespace reslab::multfn
