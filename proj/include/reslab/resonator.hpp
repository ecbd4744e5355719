#pragma once

#include "reslab/arith.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace reslab::resonator {

/// Sorted set of distinct positive integers (the set M of a binned
/// resonator, or a GCD-sum test set).
struct IntegerSet {
    std::vector<std::uint64_t> elements; // sorted ascending, distinct, >= 1

    IntegerSet() = default;
    explicit IntegerSet(std::vector<std::uint64_t> elems);

    std::size_t size() const { return elements.size(); }
    std::uint64_t min() const { return elements.front(); }
    std::uint64_t max() const { return elements.back(); }
    /// max <= 2*min, the hypothesis of the binned construction.
    bool dyadic() const { return !elements.empty() && max() <= 2 * min(); }
};

enum class Style { hough, binned };

struct SupportPoint {
    std::uint64_t n;
    double weight;
};

struct Meta {
    Style style = Style::hough;
    // hough
    double lambda = 0.0;
    double x = 0.0;
    double window_lo = 0.0, window_hi = 0.0;
    bool window_overridden = false;
    bool empty_window = false; // warning: no admissible primes; support is {1}
    // binned
    double T = 0.0;
    std::size_t bin_count = 0;
    std::vector<std::uint64_t> bin_sizes; // aligned with support (binned only)
};

struct Resonator {
    std::vector<SupportPoint> support; // sorted by n
    Meta meta;

    /// Sum of squared weights.  For binned resonators this takes the exact
    /// integer path (bin sizes sum), so it equals |M| exactly.
    double weight_sq_sum() const;
    std::uint64_t weight_sq_sum_exact() const; // binned only
};

/// Completely multiplicative resonator with r(p) = lambda / (sqrt(p) log p)
/// on primes in the window and support equal to the multiplicative closure
/// of the window truncated at x = T/N.  lambda = sqrt(log x * log log x).
///
/// Preconditions: T > N >= 1 and x > e (so log log x > 0); without an
/// override, exp((log lambda)^2) <= table.limit().  An empty prime window is
/// not an error: the support degenerates to {1} and meta.empty_window is set.
Resonator build_hough(double T, double N, const arith::PrimeTable& table,
                      std::optional<std::pair<double, double>> window_override = {});

/// Binned resonator on M: splits M into blocks M_j = M intersect
/// [(1+log T/T)^j, (1+log T/T)^{j+1}), places weight |M_j|^{1/2} on
/// m_j = min M_j.  Requires T >= 2 and a nonempty M.
Resonator build_binned(const IntegerSet& M, double T);

/// Bin index of m under mesh ratio rho = 1 + log T / T, with the boundary
/// guard used by build_binned (exposed for tests).
std::int64_t bin_index(std::uint64_t m, double rho);

struct DiagonalSums {
    double sum_r2 = 0.0;  // sum of r(m)^2 over the support (m <= x)
    double sum_rk = 0.0;  // sum of r(k) over support elements k <= N
    double i2_diag = 0.0; // sum_{k <= N} r(k) * sum_{m <= x/k} r(m)^2
};

/// Exact diagonal sums for hough-style resonators (throws
/// std::invalid_argument on binned input, whose weights are not completely
/// multiplicative).  Requires N <= x so that every closure element k <= N
/// appears in the support.
DiagonalSums diagonal_sums(const Resonator& R, double N, double x);

} // namespace reslab::resonator
