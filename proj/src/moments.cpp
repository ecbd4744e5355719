#include "reslab/moments.hpp"

#include "reslab/errors.hpp"
#include "reslab/parallel.hpp"
#include "reslab/quadrature.hpp"
#include "reslab/summation.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace reslab::moments {

namespace {

constexpr double kSqrtTwoPi = 2.5066282746310005024;

using resonator::Resonator;
using RStyle = resonator::Style;

double prefactor_of(double T) {
    if (!(T > 1.0)) throw std::invalid_argument("moments: T must exceed 1");
    return T / std::log(T);
}

// arg f(n) for every support member.  Hough closure elements can exceed the
// sieve limit; their prime factors all lie in the window, so trial division
// over the window primes recovers the angle exactly.  Binned resonators are
// untwisted: their angles are identically zero and f is not consulted.
std::vector<double> support_angles(const Resonator& R, const multfn::CMFunction& f) {
    const auto& supp = R.support;
    std::vector<double> out(supp.size(), 0.0);
    if (R.meta.style == RStyle::binned) return out;

    std::vector<std::uint64_t> wp;
    std::vector<double> wa;
    for (std::uint64_t p : f.table().primes()) {
        if (static_cast<double>(p) < R.meta.window_lo) continue;
        if (static_cast<double>(p) > R.meta.window_hi) break;
        wp.push_back(p);
        wa.push_back(f.angle_at_prime(p));
    }
    const std::uint64_t limit = f.domain_limit();
    for (std::size_t i = 0; i < supp.size(); ++i) {
        std::uint64_t n = supp[i].n;
        if (n <= limit) {
            out[i] = f.angle(n);
            continue;
        }
        Accumulator acc;
        for (std::size_t k = 0; k < wp.size() && n > 1; ++k) {
            while (n % wp[k] == 0) {
                n /= wp[k];
                acc.add(wa[k]);
            }
        }
        if (n != 1) {
            if (n > limit)
                throw std::out_of_range("support_angles: support member has a factor "
                                        "outside both the window and the sieve");
            acc.add(f.angle(n));
        }
        out[i] = acc.value();
    }
    return out;
}

// log(u/v) for integers u > 0, v > 0 with u/v near 1, computed to full
// precision via the exact integer difference.
double log_ratio(std::uint64_t u, std::uint64_t v) {
    if (u >= v)
        return std::log1p(static_cast<double>(u - v) / static_cast<double>(v));
    return -std::log1p(static_cast<double>(v - u) / static_cast<double>(u));
}

struct QuadTally {
    std::uint64_t points = 0;
    double worst_rel = 0.0;
    bool converged = true;
    Accumulator err; // sum over segments of rel-tolerance * |value|

    void fold(const quad::Result& r, double rel_tol) {
        points += r.points;
        worst_rel = std::max(worst_rel, r.achieved_rel);
        converged = converged && r.converged;
        err.add(std::max(r.achieved_rel, rel_tol) * std::abs(r.value) + 1e-300);
    }
};

} // namespace

double phi(double t) { return std::exp(-0.5 * t * t); }

double phi_hat(double xi) { return kSqrtTwoPi * std::exp(-0.5 * xi * xi); }

kernels::PhaseSeries resonator_series(const Resonator& R, const multfn::CMFunction& f) {
    std::vector<double> ang = support_angles(R, f);
    const double sign = R.meta.style == RStyle::binned ? -1.0 : 1.0;
    kernels::PhaseSeries s;
    for (std::size_t i = 0; i < R.support.size(); ++i) {
        const auto& sp = R.support[i];
        s.add(std::polar(sp.weight, ang[i]),
              sign * std::log(static_cast<double>(sp.n)));
    }
    s.finalize();
    return s;
}

kernels::PhaseSeries poly_series(const multfn::CMFunction& f, std::uint64_t N) {
    if (N < 1) throw std::invalid_argument("poly_series: N must be >= 1");
    if (N > f.domain_limit())
        throw std::out_of_range("poly_series: N exceeds the sieve limit of f");
    kernels::PhaseSeries s;
    for (std::uint64_t n = 1; n <= N; ++n)
        s.add(std::polar(1.0, f.angle(n)), std::log(static_cast<double>(n)));
    s.finalize();
    return s;
}

double I1Result::i1(double prefactor) const {
    return prefactor * (kSqrtTwoPi * diag_coeff + offdiag_coeff);
}
double I1Result::diag_i1(double prefactor) const {
    return prefactor * kSqrtTwoPi * diag_coeff;
}
double I1Result::offdiag_i1(double prefactor) const {
    return prefactor * offdiag_coeff;
}

I1Result i1_pairsum(const Resonator& R, const multfn::CMFunction& f, double T,
                    unsigned workers) {
    const double pref = prefactor_of(T);
    const auto& supp = R.support;
    const std::vector<double> ang = support_angles(R, f);
    const double ratio_cap = std::exp(kPhiHatCutoff / pref);

    struct Part {
        Accumulator off, paired;
    };
    constexpr std::size_t kIBlock = 256;
    const std::size_t nblocks = (supp.size() + kIBlock - 1) / kIBlock;
    auto parts = map_blocks<Part>(nblocks, resolve_workers(workers), [&](std::size_t b) {
        Part part;
        const std::size_t i_end = std::min(supp.size(), (b + 1) * kIBlock);
        for (std::size_t i = b * kIBlock; i < i_end; ++i) {
            const double cap = static_cast<double>(supp[i].n) * ratio_cap;
            for (std::size_t j = i + 1;
                 j < supp.size() && static_cast<double>(supp[j].n) <= cap; ++j) {
                const double arg = pref * log_ratio(supp[j].n, supp[i].n);
                if (arg > kPhiHatCutoff) continue;
                const double w = supp[i].weight * supp[j].weight;
                part.off.add(2.0 * std::cos(ang[i] - ang[j]) * w * phi_hat(arg));
                part.paired.add(2.0 * w);
            }
        }
        return part;
    });

    I1Result out;
    out.diag_coeff = R.weight_sq_sum();
    Accumulator off, paired, wsum;
    for (const auto& p : parts) {
        off.add(p.off);
        paired.add(p.paired);
    }
    for (const auto& sp : supp) wsum.add(sp.weight);
    out.offdiag_coeff = off.value();
    const double total_off = wsum.value() * wsum.value() - out.diag_coeff;
    out.discarded =
        std::max(0.0, total_off - paired.value()) * phi_hat(kPhiHatCutoff);
    return out;
}

QuadResult i1_quadrature(const Resonator& R, const multfn::CMFunction& f, double T,
                         double rel_tol, unsigned workers) {
    const double a = 1.0 / prefactor_of(T);
    kernels::PhaseSeries s = resonator_series(R, f);
    quad::Result r = quad::integrate_line(s, nullptr, quad::Form::abs2, a, rel_tol,
                                          resolve_workers(workers));
    QuadResult out;
    out.value = a * r.value.real();
    out.achieved_rel = r.achieved_rel;
    out.converged = r.converged;
    out.points = r.points;
    return out;
}

std::complex<double> I2Result::i2(double prefactor) const {
    return prefactor * (kSqrtTwoPi * diag_coeff + offdiag_coeff);
}
std::complex<double> I2Result::offdiag_i2(double prefactor) const {
    return prefactor * offdiag_coeff;
}

I2Result i2_thm11(const Resonator& R, const multfn::CMFunction& f, double T,
                  double N, double budget, unsigned workers) {
    if (R.meta.style != RStyle::hough)
        throw std::invalid_argument("i2_thm11: needs a hough-style resonator");
    if (!(N >= 1.0)) throw std::invalid_argument("i2_thm11: N must be >= 1");
    const auto kmax = static_cast<std::uint64_t>(N);
    if (kmax > f.domain_limit())
        throw std::out_of_range("i2_thm11: N exceeds the sieve limit of f");
    const double pref = prefactor_of(T);
    const auto& supp = R.support;
    if (static_cast<double>(kmax) * static_cast<double>(supp.size()) > budget)
        throw BudgetExceeded("i2_thm11: N * |support| = " +
                             std::to_string(kmax * supp.size()) +
                             " sweep positions exceed the budget of " +
                             std::to_string(budget));

    const std::vector<double> ang = support_angles(R, f);
    std::vector<double> angk(kmax + 1, 0.0);
    for (std::uint64_t k = 1; k <= kmax; ++k) angk[k] = f.angle(k);
    const long double ratio_cap = std::exp(static_cast<long double>(kPhiHatCutoff) / pref);

    struct Part {
        Accumulator diag, off_re, off_im, counted;
        std::uint64_t terms = 0;
    };
    auto parts = map_blocks<Part>(kmax, resolve_workers(workers), [&](std::size_t b) {
        const std::uint64_t k = b + 1;
        Part part;
        std::size_t lo = 0, hi = 0;
        for (std::size_t i = 0; i < supp.size(); ++i) {
            const auto km_exact =
                static_cast<unsigned __int128>(k) * supp[i].n;
            const long double km = static_cast<long double>(k) *
                                   static_cast<long double>(supp[i].n);
            const long double n_lo = km / ratio_cap;
            const long double n_hi = km * ratio_cap;
            while (lo < supp.size() && static_cast<long double>(supp[lo].n) < n_lo) ++lo;
            if (hi < lo) hi = lo;
            while (hi < supp.size() && static_cast<long double>(supp[hi].n) <= n_hi) ++hi;
            for (std::size_t j = lo; j < hi; ++j) {
                const double w = supp[i].weight * supp[j].weight;
                if (km_exact == supp[j].n) {
                    part.diag.add(w);
                    part.counted.add(w);
                    ++part.terms;
                    continue;
                }
                // km fits in 64 bits whenever a support member is nearby
                const double arg =
                    pref * log_ratio(static_cast<std::uint64_t>(km_exact), supp[j].n);
                if (std::fabs(arg) > kPhiHatCutoff) continue;
                const std::complex<double> term =
                    std::polar(w * phi_hat(arg), angk[k] + ang[i] - ang[j]);
                part.off_re.add(term.real());
                part.off_im.add(term.imag());
                part.counted.add(w);
                ++part.terms;
            }
            if (static_cast<double>(part.terms) > budget)
                throw BudgetExceeded("i2_thm11: matched terms exceed the budget of " +
                                     std::to_string(budget));
        }
        return part;
    });

    I2Result out;
    Accumulator diag, off_re, off_im, counted;
    for (const auto& p : parts) {
        diag.add(p.diag);
        off_re.add(p.off_re);
        off_im.add(p.off_im);
        counted.add(p.counted);
        out.terms += p.terms;
    }
    out.diag_coeff = diag.value();
    out.offdiag_coeff = {off_re.value(), off_im.value()};
    Accumulator wsum;
    for (const auto& sp : supp) wsum.add(sp.weight);
    const double total = static_cast<double>(kmax) * wsum.value() * wsum.value();
    out.discarded = std::max(0.0, total - counted.value()) * phi_hat(kPhiHatCutoff);
    return out;
}

I2Result i2_thm12(const Resonator& R, const multfn::CMFunction& f, double T,
                  double N, double budget, unsigned workers) {
    if (!(N >= 1.0)) throw std::invalid_argument("i2_thm12: N must be >= 1");
    const auto kmax = static_cast<std::uint64_t>(N);
    if (kmax > f.domain_limit())
        throw std::out_of_range("i2_thm12: N exceeds the sieve limit of f");
    const double pref = prefactor_of(T);
    const auto& supp = R.support;
    const double entry_estimate =
        static_cast<double>(kmax) * static_cast<double>(supp.size());
    if (entry_estimate > budget)
        throw BudgetExceeded("i2_thm12: N * |support| = " +
                             std::to_string(entry_estimate) +
                             " entries exceed the budget of " + std::to_string(budget));

    // One entry per (polynomial index a, support member n): the quadruple sum
    // over (a, n, b, m) collapses to a pair sum over entries keyed by the
    // product a*n, with weight r(n) and phase arg f(a).
    struct Entry {
        std::uint64_t v;
        std::uint64_t a;
        double w;
        double ang;
    };
    std::vector<Entry> entries;
    entries.reserve(static_cast<std::size_t>(kmax) * supp.size());
    for (std::uint64_t a = 1; a <= kmax; ++a) {
        const double fa = f.angle(a);
        for (const auto& sp : supp) {
            const auto v = static_cast<unsigned __int128>(a) * sp.n;
            if (v > static_cast<unsigned __int128>(UINT64_MAX))
                throw std::overflow_error("i2_thm12: product a*n overflows 64 bits");
            entries.push_back({static_cast<std::uint64_t>(v), a, sp.weight, fa});
        }
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& x, const Entry& y) {
        return x.v != y.v ? x.v < y.v : x.a < y.a;
    });

    I2Result out;
    Accumulator diag, diag_mass;
    for (std::size_t i = 0; i < entries.size();) {
        std::size_t j = i;
        Accumulator gre, gim, gw;
        while (j < entries.size() && entries[j].v == entries[i].v) {
            gre.add(entries[j].w * std::cos(entries[j].ang));
            gim.add(entries[j].w * std::sin(entries[j].ang));
            gw.add(entries[j].w);
            ++j;
        }
        diag.add(gre.value() * gre.value() + gim.value() * gim.value());
        diag_mass.add(gw.value() * gw.value());
        out.terms += (j - i) * (j - i);
        i = j;
    }
    out.diag_coeff = diag.value();

    const double ratio_cap = std::exp(kPhiHatCutoff / pref);
    struct Part {
        Accumulator off, paired;
        std::uint64_t pairs = 0;
    };
    constexpr std::size_t kIBlock = 1024;
    const std::size_t nblocks = (entries.size() + kIBlock - 1) / kIBlock;
    auto parts = map_blocks<Part>(nblocks, resolve_workers(workers), [&](std::size_t b) {
        Part part;
        const std::size_t i_end = std::min(entries.size(), (b + 1) * kIBlock);
        for (std::size_t i = b * kIBlock; i < i_end; ++i) {
            const double cap = static_cast<double>(entries[i].v) * ratio_cap;
            for (std::size_t j = i + 1;
                 j < entries.size() && static_cast<double>(entries[j].v) <= cap; ++j) {
                if (entries[j].v == entries[i].v) continue; // diagonal, handled above
                const double arg = pref * log_ratio(entries[j].v, entries[i].v);
                if (arg > kPhiHatCutoff) continue;
                const double w = entries[i].w * entries[j].w;
                part.off.add(2.0 * std::cos(entries[i].ang - entries[j].ang) * w *
                             phi_hat(arg));
                part.paired.add(2.0 * w);
                ++part.pairs;
            }
            if (static_cast<double>(part.pairs) > budget)
                throw BudgetExceeded("i2_thm12: matched pairs exceed the budget of " +
                                     std::to_string(budget));
        }
        return part;
    });

    Accumulator off, paired, wsum;
    for (const auto& p : parts) {
        off.add(p.off);
        paired.add(p.paired);
        out.terms += 2 * p.pairs;
    }
    for (const auto& e : entries) wsum.add(e.w);
    out.offdiag_coeff = {off.value(), 0.0};
    const double total = wsum.value() * wsum.value();
    out.discarded =
        std::max(0.0, total - diag_mass.value() - paired.value()) *
        phi_hat(kPhiHatCutoff);
    return out;
}

QuadResult m2_thm12_grid(const Resonator& R, const multfn::CMFunction& f, double T,
                         double N, double rel_tol, unsigned workers) {
    const double a = 1.0 / prefactor_of(T);
    const unsigned wk = resolve_workers(workers);
    kernels::PhaseSeries A = poly_series(f, static_cast<std::uint64_t>(N));
    kernels::PhaseSeries B = resonator_series(R, f);
    quad::Result pos = quad::integrate_segment(A, &B, quad::Form::abs2_abs2, a, 1.0, T,
                                               rel_tol, wk);
    QuadResult out;
    out.points = pos.points;
    out.achieved_rel = pos.achieved_rel;
    out.converged = pos.converged;
    if (f.real_valued()) {
        out.value = 2.0 * pos.value.real();
        return out;
    }
    quad::Result neg = quad::integrate_segment(A, &B, quad::Form::abs2_abs2, a, -T,
                                               -1.0, rel_tol, wk);
    out.value = pos.value.real() + neg.value.real();
    out.points += neg.points;
    out.achieved_rel = std::max(out.achieved_rel, neg.achieved_rel);
    out.converged = out.converged && neg.converged;
    return out;
}

double lower_bound(const MomentReport& rep) {
    if (!(rep.m1 > 0.0))
        throw std::domain_error("lower_bound: first moment is not positive");
    if (rep.style == Style::thm11) return std::abs(rep.m2) / rep.m1;
    return std::sqrt(std::max(0.0, rep.m2.real()) / rep.m1);
}

namespace {

// Shared gap machinery: subtracts the |t| < 1 window and the T < |t| tail
// from a full-line pair sum, tracking quadrature error and the truncation
// residual bound `sup_bound * gauss_tail_mass`.
struct GapResult {
    std::complex<double> small{0.0, 0.0}, outer{0.0, 0.0};
    double residual = 0.0;
    QuadTally tally;
};

GapResult gap_integrals(const kernels::PhaseSeries& A, const kernels::PhaseSeries* B,
                        quad::Form form, double a, double T, double sup_bound,
                        double rel_tol, unsigned workers) {
    GapResult g;
    quad::Result small =
        quad::integrate_segment(A, B, form, a, -1.0, 1.0, rel_tol, workers);
    g.small = small.value;
    g.tally.fold(small, rel_tol);
    const double tmax = 10.0 / a;
    if (T < tmax) {
        quad::Result right =
            quad::integrate_segment(A, B, form, a, T, tmax, rel_tol, workers);
        quad::Result left =
            quad::integrate_segment(A, B, form, a, -tmax, -T, rel_tol, workers);
        g.outer = right.value + left.value;
        g.tally.fold(right, rel_tol);
        g.tally.fold(left, rel_tol);
        g.residual = sup_bound * quad::gauss_tail_mass(a, tmax);
    } else {
        g.residual = sup_bound * quad::gauss_tail_mass(a, T);
    }
    return g;
}

} // namespace

MomentReport report_thm11(const Resonator& R, const multfn::CMFunction& f, double T,
                          double N, double rel_tol, double budget, unsigned workers) {
    const unsigned wk = resolve_workers(workers);
    const double pref = prefactor_of(T);
    const double a = 1.0 / pref;

    MomentReport rep;
    rep.style = Style::thm11;
    rep.T = T;
    rep.N = N;
    rep.prefactor = pref;

    const I1Result p1 = i1_pairsum(R, f, T, wk);
    rep.i1 = p1.i1(pref);
    rep.diag_i1 = p1.diag_i1(pref);
    rep.offdiag_i1 = p1.offdiag_i1(pref);

    kernels::PhaseSeries Rs = resonator_series(R, f);
    const double wabs = Rs.weight_abs_sum();
    GapResult g1 = gap_integrals(Rs, nullptr, quad::Form::abs2, a, T, wabs * wabs,
                                 rel_tol, wk);
    rep.gap1_small = g1.small.real();
    rep.gap1_outer = g1.outer.real();
    rep.m1 = rep.i1 - rep.gap1_small - rep.gap1_outer;
    rep.err_m1 = pref * p1.discarded + g1.tally.err.value() + g1.residual;

    const I2Result p2 = i2_thm11(R, f, T, N, budget, wk);
    rep.diag_i2 = p2.diag_coeff;
    rep.i2 = p2.i2(pref);
    rep.offdiag_i2 = p2.offdiag_i2(pref);

    kernels::PhaseSeries SN = poly_series(f, static_cast<std::uint64_t>(N));
    GapResult g2 = gap_integrals(SN, &Rs, quad::Form::first_abs2, a, T,
                                 SN.weight_abs_sum() * wabs * wabs, rel_tol, wk);
    rep.gap2_small = g2.small;
    rep.gap2_outer = g2.outer;
    rep.m2 = rep.i2 - rep.gap2_small - rep.gap2_outer;
    rep.err_m2 = pref * p2.discarded + g2.tally.err.value() + g2.residual;

    rep.quad_points = g1.tally.points + g2.tally.points;
    rep.achieved_rel = std::max(g1.tally.worst_rel, g2.tally.worst_rel);
    rep.lower_bound = lower_bound(rep);
    rep.lower_bound_low =
        std::max(0.0, std::abs(rep.m2) - rep.err_m2) / (rep.m1 + rep.err_m1);
    return rep;
}

MomentReport report_thm12(const Resonator& R, const multfn::CMFunction& f, double T,
                          double N, double rel_tol, double budget, unsigned workers) {
    const unsigned wk = resolve_workers(workers);
    const double pref = prefactor_of(T);
    const double a = 1.0 / pref;

    MomentReport rep;
    rep.style = Style::thm12;
    rep.T = T;
    rep.N = N;
    rep.prefactor = pref;

    const multfn::CMFunction one = multfn::sample_constant_one(f.table_ptr());
    const I1Result p1 = i1_pairsum(R, one, T, wk);
    rep.i1 = p1.i1(pref);
    rep.diag_i1 = p1.diag_i1(pref);
    rep.offdiag_i1 = p1.offdiag_i1(pref);

    kernels::PhaseSeries Rs = resonator_series(R, one);
    const double wabs = Rs.weight_abs_sum();
    GapResult g1 = gap_integrals(Rs, nullptr, quad::Form::abs2, a, T, wabs * wabs,
                                 rel_tol, wk);
    rep.gap1_small = g1.small.real();
    rep.gap1_outer = g1.outer.real();
    rep.m1 = rep.i1 - rep.gap1_small - rep.gap1_outer;
    rep.err_m1 = pref * p1.discarded + g1.tally.err.value() + g1.residual;

    const I2Result p2 = i2_thm12(R, f, T, N, budget, wk);
    rep.diag_i2 = p2.diag_coeff;
    rep.i2 = p2.i2(pref);
    rep.offdiag_i2 = p2.offdiag_i2(pref);

    kernels::PhaseSeries SN = poly_series(f, static_cast<std::uint64_t>(N));
    const double sabs = SN.weight_abs_sum();
    GapResult g2 = gap_integrals(SN, &Rs, quad::Form::abs2_abs2, a, T,
                                 sabs * sabs * wabs * wabs, rel_tol, wk);
    rep.gap2_small = g2.small;
    rep.gap2_outer = g2.outer;
    rep.m2 = rep.i2 - rep.gap2_small - rep.gap2_outer;
    rep.err_m2 = pref * p2.discarded + g2.tally.err.value() + g2.residual;

    rep.quad_points = g1.tally.points + g2.tally.points;
    rep.achieved_rel = std::max(g1.tally.worst_rel, g2.tally.worst_rel);
    rep.lower_bound = lower_bound(rep);
    rep.lower_bound_low = std::sqrt(std::max(0.0, rep.m2.real() - rep.err_m2) /
                                    (rep.m1 + rep.err_m1));
    return rep;
}

} // namespace reslab::moments
