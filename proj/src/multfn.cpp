#include "reslab/multfn.hpp"

#include "reslab/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace reslab::multfn {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

CMFunction::CMFunction(std::shared_ptr<const arith::PrimeTable> table,
                       std::vector<double> angles)
    : table_(std::move(table)), angles_(std::move(angles)) {
    if (!table_) throw std::invalid_argument("CMFunction: null prime table");
    if (angles_.size() > table_->primes().size())
        throw std::invalid_argument("CMFunction: more angles than primes in table");
}

double CMFunction::angle_at_prime(std::uint64_t p) const {
    std::int64_t idx = table_->prime_index(p);
    if (idx < 0 || static_cast<std::size_t>(idx) >= angles_.size()) return 0.0;
    return angles_[idx];
}

double CMFunction::angle(std::uint64_t n) const {
    if (n == 0) throw std::invalid_argument("CMFunction::angle: n must be >= 1");
    if (n > domain_limit()) throw std::out_of_range("CMFunction::angle: n beyond domain");
    double total = 0.0;
    while (n > 1) {
        std::uint32_t p = table_->smallest_factor(n);
        std::uint32_t e = 0;
        while (n % p == 0) { n /= p; ++e; }
        total += e * angle_at_prime(p);
    }
    return total;
}

std::complex<double> CMFunction::evaluate(std::uint64_t n) const {
    return std::polar(1.0, angle(n));
}

bool CMFunction::real_valued() const {
    for (double a : angles_)
        if (a != 0.0 && a != std::numbers::pi) return false;
    return true;
}

CMFunction CMFunction::conjugated() const {
    std::vector<double> neg(angles_);
    for (double& a : neg) a = -a;
    return CMFunction(table_, std::move(neg));
}

namespace {

// Maximal circular distance between angle points (each <= pi), with the
// realizing pair.  Points are (angle in [0, 2pi), witness n).
struct MaxDist {
    double d = 0.0;
    std::size_t i = 0, j = 0;
};

MaxDist max_circular_distance(const std::vector<std::pair<double, std::uint64_t>>& pts) {
    MaxDist best;
    const std::size_t M = pts.size();
    for (std::size_t i = 0; i < M; ++i) {
        // the farthest point from pts[i] is the one nearest its antipode
        double target = pts[i].first + std::numbers::pi;
        if (target >= kTwoPi) target -= kTwoPi;
        std::size_t lo = std::lower_bound(pts.begin(), pts.end(),
                                          std::make_pair(target, std::uint64_t{0})) -
                         pts.begin();
        for (std::size_t cand : {lo % M, (lo + M - 1) % M}) {
            double delta = std::fabs(pts[i].first - pts[cand].first);
            double d = std::min(delta, kTwoPi - delta);
            if (d > best.d) best = {d, i, cand};
        }
    }
    return best;
}

} // namespace

FcResult check_fc(const CMFunction& f, std::uint64_t N, double c) {
    if (N < 1) throw std::invalid_argument("check_fc: N must be >= 1");
    if (N > f.domain_limit()) throw std::out_of_range("check_fc: N beyond domain of f");
    if (!(c > 0.0 && c < 1.0)) throw std::invalid_argument("check_fc: c must lie in (0, 1)");

    // angle(n) for all n <= N via the smallest-prime-factor recursion
    const arith::PrimeTable& table = f.table();
    std::vector<double> ang(static_cast<std::size_t>(N) + 1, 0.0);
    for (std::uint64_t n = 2; n <= N; ++n) {
        std::uint32_t p = table.smallest_factor(n);
        ang[n] = ang[n / p] + f.angle_at_prime(p);
    }

    std::vector<std::pair<double, std::uint64_t>> pts;
    pts.reserve(N);
    for (std::uint64_t n = 1; n <= N; ++n) {
        double a = std::fmod(ang[n], kTwoPi);
        if (a < 0.0) a += kTwoPi;
        if (a >= kTwoPi) a = 0.0;
        pts.emplace_back(a, n);
    }
    std::sort(pts.begin(), pts.end());

    // minimal enclosing arc = 2pi minus the largest gap between neighbours
    double largest_gap = kTwoPi - pts.back().first + pts.front().first;
    for (std::size_t i = 1; i < pts.size(); ++i)
        largest_gap = std::max(largest_gap, pts[i].first - pts[i - 1].first);

    FcResult out;
    out.arc.width = (pts.size() == 1) ? 0.0 : kTwoPi - largest_gap;
    if (pts.size() == 1) {
        out.arc.min_pair_re = 1.0;
        out.arc.witness = {pts[0].second, pts[0].second};
    } else {
        MaxDist md = max_circular_distance(pts);
        out.arc.min_pair_re = std::cos(md.d);
        out.arc.witness = {pts[md.i].second, pts[md.j].second};
    }
    out.member = out.arc.width <= std::acos(c);
    return out;
}

CMFunction sample_constant_one(std::shared_ptr<const arith::PrimeTable> table) {
    return CMFunction(std::move(table), {});
}

CMFunction sample_random_unimodular(std::shared_ptr<const arith::PrimeTable> table,
                                    std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::vector<double> angles(table->primes().size());
    for (double& a : angles) {
        // uniform on (-pi, pi]: negate a draw from [0, 2pi) shifted
        a = std::numbers::pi - kTwoPi * uniform01(gen);
    }
    return CMFunction(std::move(table), std::move(angles));
}

CMFunction sample_arc_constrained(std::shared_ptr<const arith::PrimeTable> table,
                                  double c, std::uint64_t N, std::uint64_t seed) {
    if (!(c > 0.0 && c < 1.0))
        throw std::invalid_argument("sample_arc_constrained: c must lie in (0, 1)");
    if (N < 1) throw std::invalid_argument("sample_arc_constrained: N must be >= 1");
    // Omega(n) <= log2(n) for n <= N, so capping each prime angle at
    // arccos(c)/floor(log2 N) confines every f(n), n <= N, to one arc.
    std::uint64_t omega_max = 1; // max(1, floor(log2 N))
    while ((N >> (omega_max + 1)) > 0) ++omega_max;
    double cap = std::acos(c) / static_cast<double>(omega_max);
    std::mt19937_64 gen(seed);
    std::vector<double> angles(table->primes().size());
    for (double& a : angles) a = cap * uniform01(gen);
    return CMFunction(std::move(table), std::move(angles));
}

CMFunction sample(SampleKind kind, std::shared_ptr<const arith::PrimeTable> table,
                  std::uint64_t seed, double c, std::uint64_t N) {
    switch (kind) {
        case SampleKind::constant_one: return sample_constant_one(std::move(table));
        case SampleKind::random_unimodular:
            return sample_random_unimodular(std::move(table), seed);
        case SampleKind::arc_constrained:
            return sample_arc_constrained(std::move(table), c, N, seed);
    }
    throw std::invalid_argument("sample: unknown kind");
}

} // namespace reslab::multfn
