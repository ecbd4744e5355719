#include "reslab/gcdsum.hpp"

#include "reslab/errors.hpp"
#include "reslab/parallel.hpp"
#include "reslab/rng.hpp"
#include "reslab/summation.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>

namespace reslab::gcdsum {

using resonator::IntegerSet;

namespace {

constexpr std::size_t kRowBlock = 64;

// One pair term sqrt(g/l) through the overflow-checked lcm.
double pair_ratio(std::uint64_t m, std::uint64_t n) {
    std::uint64_t g = std::gcd(m, n);
    std::uint64_t l = arith::checked_lcm(m, n);
    return std::sqrt(static_cast<double>(g) / static_cast<double>(l));
}

} // namespace

double gcd_sum(const IntegerSet& M, unsigned workers) {
    const auto& e = M.elements;
    if (e.empty()) throw std::invalid_argument("gcd_sum: empty set");
    const std::size_t K = e.size();
    std::size_t nblocks = (K + kRowBlock - 1) / kRowBlock;
    auto parts = map_blocks<Accumulator>(nblocks, workers, [&](std::size_t b) {
        Accumulator acc;
        std::size_t lo = b * kRowBlock, hi = std::min(K, lo + kRowBlock);
        for (std::size_t i = lo; i < hi; ++i)
            for (std::size_t j = i + 1; j < K; ++j)
                acc.add(2.0 * pair_ratio(e[i], e[j]));
        return acc;
    });
    Accumulator total;
    total.add(static_cast<double>(K)); // diagonal: K terms of sqrt(g/l) = 1
    for (const auto& p : parts) total.add(p);
    return total.value() / static_cast<double>(K);
}

GcdSumReport gcd_sum_truncated(const IntegerSet& M, double N, unsigned workers) {
    const auto& e = M.elements;
    if (e.empty()) throw std::invalid_argument("gcd_sum_truncated: empty set");
    if (!(N >= 1.0)) throw std::invalid_argument("gcd_sum_truncated: N must be >= 1");
    const std::size_t K = e.size();
    const long double cut = static_cast<long double>(N) * N / 2.0L;

    struct Part {
        Accumulator full, trunc, tail;
    };
    std::size_t nblocks = (K + kRowBlock - 1) / kRowBlock;
    auto parts = map_blocks<Part>(nblocks, workers, [&](std::size_t b) {
        Part part;
        std::size_t lo = b * kRowBlock, hi = std::min(K, lo + kRowBlock);
        for (std::size_t i = lo; i < hi; ++i) {
            for (std::size_t j = i + 1; j < K; ++j) {
                std::uint64_t g = std::gcd(e[i], e[j]);
                double term = 2.0 * pair_ratio(e[i], e[j]);
                // [m,n]/(m,n) = (m/g)*(n/g)
                unsigned __int128 q =
                    static_cast<unsigned __int128>(e[i] / g) * (e[j] / g);
                part.full.add(term);
                if (static_cast<long double>(q) <= cut) part.trunc.add(term);
                else part.tail.add(term);
            }
        }
        return part;
    });

    Accumulator full, trunc, tail;
    full.add(static_cast<double>(K)); // diagonal: [m,m]/(m,m) = 1
    if (1.0L <= cut) trunc.add(static_cast<double>(K));
    else tail.add(static_cast<double>(K));
    for (const auto& p : parts) {
        full.add(p.full);
        trunc.add(p.trunc);
        tail.add(p.tail);
    }

    GcdSumReport rep;
    rep.full = full.value() / static_cast<double>(K);
    rep.truncated = trunc.value() / static_cast<double>(K);
    rep.tail_exact = tail.value() / static_cast<double>(K);
    rep.N = N;
    rep.K = K;
    return rep;
}

std::uint64_t largest_prime_over_set(const IntegerSet& M, const arith::PrimeTable& table) {
    std::uint64_t best = 1;
    for (std::uint64_t m : M.elements)
        best = std::max(best, arith::largest_prime_factor(m, table));
    return best;
}

double tail_bound(const IntegerSet& M, double N, double eta,
                  const arith::PrimeTable& table) {
    if (!(eta > 0.0 && eta < 0.5))
        throw std::invalid_argument("tail_bound: eta must lie in (0, 1/2)");
    if (!(N >= 1.0)) throw std::invalid_argument("tail_bound: N must be >= 1");
    std::uint64_t y = largest_prime_over_set(M, table);

    double logprod = 0.0;
    auto fold = [&](const arith::PrimeTable& t) {
        for (std::uint32_t p : t.primes()) {
            if (p > y) break;
            double denom = std::pow(static_cast<double>(p), 0.5 - eta) - 1.0;
            logprod += std::log1p(2.0 / denom);
        }
    };
    if (y <= table.limit()) {
        fold(table);
    } else {
        arith::PrimeTable wide(y);
        fold(wide);
    }
    return static_cast<double>(M.size()) *
           std::exp(-2.0 * eta * std::log(N) + logprod);
}

double lemma_rate(std::uint64_t K) {
    double l1 = std::log(static_cast<double>(K));
    double l2 = (l1 > 0.0) ? std::log(l1) : -1.0;
    double l3 = (l2 > 0.0) ? std::log(l2) : -1.0;
    if (!(l3 > 0.0))
        throw std::domain_error("lemma_rate: needs log log log K > 0, i.e. K > e^e "
                                "(K = " + std::to_string(K) + ")");
    return std::exp(2.0 * std::sqrt(2.0) * std::sqrt(l1 * l3 / l2));
}

std::uint64_t pair_solution_count(std::uint64_t m, std::uint64_t n, double N) {
    if (m == 0 || n == 0)
        throw std::invalid_argument("pair_solution_count: m, n must be >= 1");
    if (!(N >= 0.0)) throw std::invalid_argument("pair_solution_count: N must be >= 0");
    std::uint64_t g = std::gcd(m, n);
    // a*m = b*n  <=>  (a, b) = t * (n/g, m/g)
    std::uint64_t step = std::max(m / g, n / g);
    double q = N / static_cast<double>(step);
    return (q < 1.0) ? 0 : static_cast<std::uint64_t>(std::floor(q));
}

namespace {

// gcd-sum contribution of v against everything in `set` except itself,
// doubled for symmetry (used by the swap local search).
double cross_sum(std::uint64_t v, const std::vector<std::uint64_t>& set,
                 std::uint64_t skip) {
    Accumulator acc;
    for (std::uint64_t m : set) {
        if (m == skip || m == v) continue;
        acc.add(2.0 * pair_ratio(v, m));
    }
    return acc.value();
}

} // namespace

IntegerSet construct_candidate_set(const ConstructParams& params,
                                   const arith::PrimeTable& table) {
    if (params.K < 1) throw std::invalid_argument("construct_candidate_set: K must be >= 1");
    if (params.y < 2) throw std::invalid_argument("construct_candidate_set: y must be >= 2");
    if (params.window_center < 1)
        throw std::invalid_argument("construct_candidate_set: window_center must be >= 1");

    const std::uint64_t W = params.window_center;
    std::vector<std::uint64_t> cand;
    for (std::uint64_t v : arith::window_integers(2.0 * static_cast<double>(W), 2.0,
                                                  static_cast<double>(params.y), table))
        if (v >= W) cand.push_back(v);

    if (cand.size() < params.K)
        throw Infeasible("construct_candidate_set: only " + std::to_string(cand.size()) +
                         " " + std::to_string(params.y) + "-smooth integers in [" +
                         std::to_string(W) + ", " + std::to_string(2 * W) +
                         "], need K = " + std::to_string(params.K));

    // Greedy seed: most divisor-rich candidates first (ties to the smaller).
    std::vector<std::uint32_t> tau(cand.size());
    for (std::size_t i = 0; i < cand.size(); ++i) {
        auto fac = arith::factorize(cand[i], table);
        std::uint32_t d = 1;
        for (const auto& f : fac.factors) d *= f.exponent + 1;
        tau[i] = d;
    }
    std::vector<std::size_t> order(cand.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (tau[a] != tau[b]) return tau[a] > tau[b];
        return cand[a] < cand[b];
    });

    std::vector<std::uint64_t> chosen;
    std::vector<bool> in_set(cand.size(), false);
    for (std::size_t i = 0; i < params.K; ++i) {
        chosen.push_back(cand[order[i]]);
        in_set[order[i]] = true;
    }

    // Swap local search: random (out, in) proposals, accept strict improvements.
    if (cand.size() > params.K && params.K >= 1) {
        std::vector<std::size_t> pos_of(cand.size(), 0);
        std::vector<std::size_t> members; // candidate indices currently chosen
        std::vector<std::size_t> outside;
        for (std::size_t i = 0; i < cand.size(); ++i)
            (in_set[i] ? members : outside).push_back(i);
        for (std::size_t k = 0; k < members.size(); ++k) pos_of[members[k]] = k;
        for (std::size_t k = 0; k < outside.size(); ++k) pos_of[outside[k]] = k;

        std::mt19937_64 gen(params.seed);
        for (std::uint64_t step = 0; step < params.search_budget; ++step) {
            std::size_t mi = members[uniform_index(gen, members.size())];
            std::size_t oi = outside[uniform_index(gen, outside.size())];
            double gain = cross_sum(cand[oi], chosen, cand[mi]) -
                          cross_sum(cand[mi], chosen, cand[mi]);
            if (gain > 1e-12) {
                // swap mi out, oi in
                std::size_t pm = pos_of[mi], po = pos_of[oi];
                members[pm] = oi;
                outside[po] = mi;
                pos_of[oi] = pm;
                pos_of[mi] = po;
                auto it = std::find(chosen.begin(), chosen.end(), cand[mi]);
                *it = cand[oi];
            }
        }
    }

    return IntegerSet(std::move(chosen));
}

} // namespace reslab::gcdsum
