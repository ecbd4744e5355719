#include "doctest.h"

#include "reslab/arith.hpp"
#include "reslab/errors.hpp"
#include "reslab/moments.hpp"
#include "reslab/multfn.hpp"
#include "reslab/quadrature.hpp"
#include "reslab/resonator.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

using namespace reslab;

namespace {

std::shared_ptr<const arith::PrimeTable> table(std::uint64_t limit) {
    return std::make_shared<arith::PrimeTable>(limit);
}

resonator::IntegerSet interval(std::uint64_t lo, std::uint64_t hi) {
    std::vector<std::uint64_t> v;
    for (std::uint64_t n = lo; n <= hi; ++n) v.push_back(n);
    return resonator::IntegerSet(std::move(v));
}

constexpr double kSqrtTwoPi = 2.5066282746310005024;

} // namespace

TEST_SUITE("moments") {

TEST_CASE("gaussian pair values") {
    CHECK(moments::phi(0.0) == 1.0);
    CHECK(moments::phi(1.0) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
    CHECK(moments::phi_hat(0.0) == doctest::Approx(kSqrtTwoPi).epsilon(1e-15));
    CHECK(moments::phi_hat(2.0) ==
          doctest::Approx(kSqrtTwoPi * std::exp(-2.0)).epsilon(1e-15));
    CHECK(moments::phi_hat(-2.0) == moments::phi_hat(2.0));
    CHECK(moments::phi_hat(moments::kPhiHatCutoff) < 1.4e-31);
}

TEST_CASE("i1 pair sum matches the naive full double loop") {
    auto tbl = table(64);
    const double T = 5000.0;
    arith::PrimeTable sieve(64);
    const auto R = resonator::build_hough(T, 30.0, sieve, std::pair{3.0, 13.0});
    const double pref = T / std::log(T);

    for (std::uint64_t seed : {0ull, 5ull}) {
        const auto f = seed == 0 ? multfn::sample_constant_one(tbl)
                                 : multfn::sample_random_unimodular(tbl, seed);
        const auto got = moments::i1_pairsum(R, f, T, 1);

        // exact angles for closure members via their window factorization
        arith::PrimeTable big(256);
        double diag = 0.0, off = 0.0;
        for (const auto& a : R.support) diag += a.weight * a.weight;
        for (const auto& a : R.support)
            for (const auto& b : R.support) {
                if (a.n == b.n) continue;
                double ang = 0.0;
                for (const auto& pp : arith::factorize(a.n, big).factors)
                    ang += pp.exponent * f.angle_at_prime(pp.prime);
                for (const auto& pp : arith::factorize(b.n, big).factors)
                    ang -= pp.exponent * f.angle_at_prime(pp.prime);
                const double arg =
                    pref * (std::log(static_cast<double>(a.n)) -
                            std::log(static_cast<double>(b.n)));
                off += std::cos(ang) * a.weight * b.weight * moments::phi_hat(arg);
            }
        CHECK(got.diag_coeff == doctest::Approx(diag).epsilon(1e-13));
        CHECK(got.offdiag_coeff ==
              doctest::Approx(off).epsilon(1e-10).scale(std::fabs(diag)));
        CHECK(got.discarded >= 0.0);
        CHECK(got.i1(pref) ==
              doctest::Approx(pref * (kSqrtTwoPi * diag + off)).epsilon(1e-10));
    }
}

TEST_CASE("fourier identity: pair sum equals the oscillatory integral") {
    // int (m/n)^{it} Phi(at) dt = phi_hat(log(m/n)/a)/a, summed over pairs
    auto tbl = table(64);
    arith::PrimeTable sieve(64);

    struct Case {
        resonator::Resonator R;
        double T;
    };
    std::vector<Case> cases;
    cases.push_back({resonator::build_hough(5000.0, 30.0, sieve, std::pair{3.0, 13.0}),
                     5000.0});
    cases.push_back({resonator::build_binned(interval(60, 90), 800.0), 800.0});

    for (const auto& [R, T] : cases) {
        for (std::uint64_t seed : {0ull, 9ull}) {
            const auto f = seed == 0 ? multfn::sample_constant_one(tbl)
                                     : multfn::sample_random_unimodular(tbl, seed);
            const auto pair = moments::i1_pairsum(R, f, T, 1);
            const auto quad = moments::i1_quadrature(R, f, T, 1e-10, 1);
            REQUIRE(quad.converged);
            const double pref = T / std::log(T);
            const double scaled = pair.i1(pref) / pref; // back to quad's units
            CHECK(scaled == doctest::Approx(quad.value).epsilon(1e-8));
        }
    }
}

TEST_CASE("i2 thm11 diagonal equals the closed-form diagonal sums") {
    arith::PrimeTable sieve(64);
    auto tbl = table(64);
    const double T = 5000.0, N = 30.0;
    const auto R = resonator::build_hough(T, N, sieve, std::pair{3.0, 13.0});
    const auto f = multfn::sample_random_unimodular(tbl, 3);
    const auto part = moments::i2_thm11(R, f, T, N, 1e9, 1);
    const auto d = resonator::diagonal_sums(R, N, T / N);
    CHECK(part.diag_coeff == doctest::Approx(d.i2_diag).epsilon(1e-12));
    CHECK(part.discarded >= 0.0);
}

TEST_CASE("trivial support reduces i2 to the k = n = 1 term") {
    arith::PrimeTable sieve(64);
    auto tbl = table(64);
    const auto R = resonator::build_hough(5000.0, 30.0, sieve, std::pair{14.0, 16.0});
    REQUIRE(R.meta.empty_window);
    const auto f = multfn::sample_constant_one(tbl);
    const auto part = moments::i2_thm11(R, f, 5000.0, 3.0, 1e9, 1);
    CHECK(part.diag_coeff == 1.0);
    CHECK(std::abs(part.offdiag_coeff) == 0.0);
}

TEST_CASE("i2 thm12 matches the naive quadruple loop") {
    auto tbl = table(64);
    const double T = 300.0, N = 6.0;
    const auto M = interval(40, 60);
    const auto R = resonator::build_binned(M, T);
    const double pref = T / std::log(T);

    for (std::uint64_t seed : {0ull, 7ull}) {
        const auto f = seed == 0 ? multfn::sample_constant_one(tbl)
                                 : multfn::sample_random_unimodular(tbl, seed);
        const auto got = moments::i2_thm12(R, f, T, N, 1e9, 1);

        std::complex<double> brute{0.0, 0.0};
        for (std::uint64_t a = 1; a <= 6; ++a)
            for (std::uint64_t b = 1; b <= 6; ++b)
                for (const auto& sm : R.support)
                    for (const auto& sn : R.support) {
                        const double va = static_cast<double>(a * sm.n);
                        const double vb = static_cast<double>(b * sn.n);
                        const double arg = pref * std::log(va / vb);
                        const auto phase = f.evaluate(a) * std::conj(f.evaluate(b));
                        brute += phase * sm.weight * sn.weight * moments::phi_hat(arg);
                    }
        const auto got_total = got.i2(pref) / pref; // coefficient view
        CHECK(got_total.real() == doctest::Approx(brute.real()).epsilon(1e-10));
        CHECK(std::fabs(got_total.imag()) < 1e-10 * std::fabs(brute.real()));
        CHECK(std::fabs(brute.imag()) < 1e-10 * std::fabs(brute.real()));
    }
}

TEST_CASE("work budgets are enforced") {
    arith::PrimeTable sieve(64);
    auto tbl = table(64);
    const auto R = resonator::build_hough(5000.0, 30.0, sieve, std::pair{3.0, 13.0});
    const auto f = multfn::sample_constant_one(tbl);
    CHECK_THROWS_AS((void)moments::i2_thm11(R, f, 5000.0, 30.0, 10.0, 1), BudgetExceeded);

    const auto B = resonator::build_binned(interval(40, 60), 300.0);
    CHECK_THROWS_AS((void)moments::i2_thm12(B, f, 300.0, 6.0, 5.0, 1), BudgetExceeded);
}

TEST_CASE("thm11 report: identities, gaps, and independent integrals") {
    arith::PrimeTable sieve(64);
    auto tbl = table(64);
    const double T = 5000.0, N = 30.0;
    const auto R = resonator::build_hough(T, N, sieve, std::pair{3.0, 13.0});
    const auto f = multfn::sample_constant_one(tbl);
    const auto rep = moments::report_thm11(R, f, T, N, 1e-9, 1e9, 1);

    CHECK(rep.style == moments::Style::thm11);
    CHECK(rep.prefactor == doctest::Approx(T / std::log(T)).epsilon(1e-15));
    CHECK(rep.i1 == doctest::Approx(rep.diag_i1 + rep.offdiag_i1).epsilon(1e-12));
    CHECK(rep.m1 ==
          doctest::Approx(rep.i1 - rep.gap1_small - rep.gap1_outer).epsilon(1e-12));
    CHECK(rep.m2.real() ==
          doctest::Approx(rep.i2.real() - rep.gap2_small.real() - rep.gap2_outer.real())
              .epsilon(1e-12));
    CHECK(rep.err_m1 >= 0.0);
    CHECK(rep.err_m2 >= 0.0);
    CHECK(rep.lower_bound == doctest::Approx(std::abs(rep.m2) / rep.m1).epsilon(1e-13));
    CHECK(rep.lower_bound == moments::lower_bound(rep));
    CHECK(rep.lower_bound_low <= rep.lower_bound);
    CHECK(rep.lower_bound_low >= 0.0);
    CHECK(rep.quad_points > 0);

    // the bound cannot exceed the trivial maximum sum_{n<=N} |f(n)| = N
    CHECK(rep.lower_bound < N);

    // independent check of m2 by numerical integration over 1 <= |t| <= T
    const auto SN = moments::poly_series(f, static_cast<std::uint64_t>(N));
    const auto Rs = moments::resonator_series(R, f);
    const double a = 1.0 / rep.prefactor;
    const auto pos = quad::integrate_segment(SN, &Rs, quad::Form::first_abs2, a, 1.0, T,
                                             1e-9, 1);
    const auto neg = quad::integrate_segment(SN, &Rs, quad::Form::first_abs2, a, -T,
                                             -1.0, 1e-9, 1);
    REQUIRE(pos.converged);
    REQUIRE(neg.converged);
    const auto direct = pos.value + neg.value;
    CHECK(rep.m2.real() == doctest::Approx(direct.real()).epsilon(1e-7));
    CHECK(std::fabs(rep.m2.imag() - direct.imag()) < 1e-7 * std::fabs(direct.real()));
}

TEST_CASE("thm12 report: identities and grid cross-check") {
    auto tbl = table(64);
    const double T = 800.0, N = 20.0;
    const auto R = resonator::build_binned(interval(60, 90), T);

    for (std::uint64_t seed : {0ull, 11ull}) {
        const auto f = seed == 0 ? multfn::sample_constant_one(tbl)
                                 : multfn::sample_random_unimodular(tbl, seed);
        const auto rep = moments::report_thm12(R, f, T, N, 1e-8, 1e9, 1);
        CHECK(rep.style == moments::Style::thm12);
        CHECK(rep.m1 ==
              doctest::Approx(rep.i1 - rep.gap1_small - rep.gap1_outer).epsilon(1e-12));
        CHECK(rep.lower_bound ==
              doctest::Approx(std::sqrt(rep.m2.real() / rep.m1)).epsilon(1e-13));
        CHECK(rep.lower_bound_low <= rep.lower_bound);
        CHECK(std::fabs(rep.m2.imag()) <= 1e-10 * rep.m2.real());
        CHECK(rep.lower_bound < N);

        const auto grid = moments::m2_thm12_grid(R, f, T, N, 1e-9, 1);
        REQUIRE(grid.converged);
        CHECK(rep.m2.real() == doctest::Approx(grid.value).epsilon(1e-6));
    }
}

TEST_CASE("binned resonators ignore the twist") {
    // |R(t)|^2 has no f dependence in the binned construction, so i1 must not
    // change across functions
    auto tbl = table(64);
    const double T = 800.0;
    const auto R = resonator::build_binned(interval(60, 90), T);
    const auto a = moments::i1_pairsum(R, multfn::sample_constant_one(tbl), T, 1);
    const auto b =
        moments::i1_pairsum(R, multfn::sample_random_unimodular(tbl, 5), T, 1);
    CHECK(a.diag_coeff == b.diag_coeff);
    CHECK(a.offdiag_coeff == b.offdiag_coeff);
}

TEST_CASE("lower bound rejects a nonpositive first moment") {
    moments::MomentReport rep;
    rep.style = moments::Style::thm11;
    rep.m1 = 0.0;
    rep.m2 = {1.0, 0.0};
    CHECK_THROWS_AS((void)moments::lower_bound(rep), std::domain_error);
}

TEST_CASE("series builders respect domains") {
    auto tbl = table(64);
    const auto f = multfn::sample_constant_one(tbl);
    CHECK_THROWS_AS((void)moments::poly_series(f, 100), std::out_of_range);
    const auto s = moments::poly_series(f, 10);
    CHECK(s.count == 10);
    CHECK(s.weight_abs_sum() == doctest::Approx(10.0));
}

} // TEST_SUITE
