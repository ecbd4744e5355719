#include "reslab/resonator.hpp"

#include "reslab/summation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace reslab::resonator {

IntegerSet::IntegerSet(std::vector<std::uint64_t> elems) : elements(std::move(elems)) {
    if (elements.empty()) throw std::invalid_argument("IntegerSet: empty set");
    std::sort(elements.begin(), elements.end());
    elements.erase(std::unique(elements.begin(), elements.end()), elements.end());
    if (elements.front() == 0) throw std::invalid_argument("IntegerSet: elements must be >= 1");
}

double Resonator::weight_sq_sum() const {
    if (meta.style == Style::binned)
        return static_cast<double>(weight_sq_sum_exact());
    Accumulator acc;
    for (const auto& sp : support) acc.add(sp.weight * sp.weight);
    return acc.value();
}

std::uint64_t Resonator::weight_sq_sum_exact() const {
    if (meta.style != Style::binned)
        throw std::invalid_argument("weight_sq_sum_exact: hough weights are not integer-squared");
    std::uint64_t total = 0;
    for (std::uint64_t c : meta.bin_sizes) total += c;
    return total;
}

namespace {

// DFS over admissible primes carrying both the product and its log-weight,
// log r(n) = sum_p e_p * (log lambda - log p / 2 - log log p).
void hough_dfs(std::uint64_t cur, double cur_logw, std::size_t idx,
               const std::vector<std::uint32_t>& ps,
               const std::vector<double>& step_logw, std::uint64_t cap,
               std::vector<SupportPoint>& out) {
    if (idx == ps.size()) {
        out.push_back({cur, std::exp(cur_logw)});
        return;
    }
    std::uint64_t p = ps[idx];
    std::uint64_t v = cur;
    double lw = cur_logw;
    for (;;) {
        hough_dfs(v, lw, idx + 1, ps, step_logw, cap, out);
        if (v > cap / p) break;
        v *= p;
        lw += step_logw[idx];
    }
}

} // namespace

Resonator build_hough(double T, double N, const arith::PrimeTable& table,
                      std::optional<std::pair<double, double>> window_override) {
    if (!(N >= 1.0) || !(T > N))
        throw std::invalid_argument("build_hough: need T > N >= 1");
    double x = T / N;
    double logx = std::log(x);
    if (!(logx > 1.0))
        throw std::invalid_argument("build_hough: x = T/N must exceed e (log log x undefined)");
    double lambda = std::sqrt(logx * std::log(logx));

    Resonator R;
    R.meta.style = Style::hough;
    R.meta.lambda = lambda;
    R.meta.x = x;
    if (window_override) {
        R.meta.window_lo = window_override->first;
        R.meta.window_hi = window_override->second;
        R.meta.window_overridden = true;
    } else {
        double loglam = std::log(lambda);
        R.meta.window_lo = lambda * lambda;
        R.meta.window_hi = std::exp(loglam * loglam);
    }
    if (R.meta.window_hi > static_cast<double>(table.limit()) + 0.5)
        throw std::invalid_argument("build_hough: prime window exceeds sieve limit; "
                                    "raise the limit or override the window");

    std::vector<std::uint32_t> ps;
    for (std::uint32_t p : table.primes()) {
        if (static_cast<double>(p) < R.meta.window_lo) continue;
        if (static_cast<double>(p) > R.meta.window_hi) break;
        ps.push_back(p);
    }
    if (ps.empty()) {
        R.meta.empty_window = true;
        R.support.push_back({1, 1.0});
        return R;
    }

    std::vector<double> step_logw(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i) {
        double lp = std::log(static_cast<double>(ps[i]));
        step_logw[i] = std::log(lambda) - 0.5 * lp - std::log(lp);
    }
    std::uint64_t cap = (x >= 9.2e18) ? 0xFFFFFFFFFFFFFFFFull
                                      : static_cast<std::uint64_t>(std::floor(x));
    hough_dfs(1, 0.0, 0, ps, step_logw, cap, R.support);
    std::sort(R.support.begin(), R.support.end(),
              [](const SupportPoint& a, const SupportPoint& b) { return a.n < b.n; });
    return R;
}

namespace {

// rho^j by binary exponentiation in extended precision; j >= 0.
long double pow_repeated(double rho, std::int64_t j) {
    long double base = rho, acc = 1.0L;
    std::uint64_t e = static_cast<std::uint64_t>(j);
    while (e) {
        if (e & 1) acc *= base;
        base *= base;
        e >>= 1;
    }
    return acc;
}

} // namespace

std::int64_t bin_index(std::uint64_t m, double rho) {
    if (m == 0) throw std::invalid_argument("bin_index: m must be >= 1");
    if (!(rho > 1.0)) throw std::invalid_argument("bin_index: mesh ratio must exceed 1");
    std::int64_t j = static_cast<std::int64_t>(
        std::floor(std::log(static_cast<double>(m)) / std::log(rho)));
    if (j < 0) j = 0;
    // Settle boundary cases against half-open bins [rho^j, rho^{j+1}) using
    // repeated multiplication rather than exp/log round-off.
    while (pow_repeated(rho, j + 1) <= static_cast<long double>(m)) ++j;
    while (j > 0 && pow_repeated(rho, j) > static_cast<long double>(m)) --j;
    return j;
}

Resonator build_binned(const IntegerSet& M, double T) {
    if (M.elements.empty()) throw std::invalid_argument("build_binned: empty M");
    if (!(T >= 2.0)) throw std::invalid_argument("build_binned: need T >= 2");
    double rho = 1.0 + std::log(T) / T;

    // group by bin index; elements are sorted, so each bin's first element
    // is its minimum
    std::map<std::int64_t, std::pair<std::uint64_t, std::uint64_t>> bins; // j -> (min, count)
    for (std::uint64_t m : M.elements) {
        std::int64_t j = bin_index(m, rho);
        auto it = bins.find(j);
        if (it == bins.end()) bins.emplace(j, std::make_pair(m, std::uint64_t{1}));
        else ++it->second.second;
    }

    Resonator R;
    R.meta.style = Style::binned;
    R.meta.T = T;
    R.meta.bin_count = bins.size();
    for (const auto& [j, bin] : bins) {
        (void)j;
        R.support.push_back({bin.first, std::sqrt(static_cast<double>(bin.second))});
        R.meta.bin_sizes.push_back(bin.second);
    }
    return R;
}

DiagonalSums diagonal_sums(const Resonator& R, double N, double x) {
    if (R.meta.style != Style::hough)
        throw std::invalid_argument("diagonal_sums: requires a completely multiplicative "
                                    "(hough-style) resonator");
    if (!(N >= 1.0)) throw std::invalid_argument("diagonal_sums: N must be >= 1");
    if (N > x)
        throw std::invalid_argument("diagonal_sums: need N <= x so the closure below N "
                                    "is contained in the support");

    const auto& sup = R.support;
    std::vector<double> prefix_r2(sup.size() + 1, 0.0);
    {
        Accumulator acc;
        for (std::size_t i = 0; i < sup.size(); ++i) {
            acc.add(sup[i].weight * sup[i].weight);
            prefix_r2[i + 1] = acc.value();
        }
    }

    DiagonalSums out;
    out.sum_r2 = prefix_r2[sup.size()];

    Accumulator rk, diag;
    for (const auto& sp : sup) {
        if (static_cast<double>(sp.n) > N) break;
        rk.add(sp.weight);
        // largest support index with m <= x / k, i.e. m * k <= x
        std::uint64_t k = sp.n;
        auto it = std::upper_bound(sup.begin(), sup.end(), x,
                                   [k](double xv, const SupportPoint& s) {
                                       return static_cast<long double>(xv) <
                                              static_cast<long double>(s.n) * k;
                                   });
        diag.add(sp.weight * prefix_r2[static_cast<std::size_t>(it - sup.begin())]);
    }
    out.sum_rk = rk.value();
    out.i2_diag = diag.value();
    return out;
}

} // namespace reslab::resonator
