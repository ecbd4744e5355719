#include "doctest.h"

#include "reslab/arith.hpp"
#include "reslab/extremes.hpp"
#include "reslab/gcdsum.hpp"
#include "reslab/kernels.hpp"
#include "reslab/moments.hpp"
#include "reslab/multfn.hpp"
#include "reslab/parallel.hpp"
#include "reslab/quadrature.hpp"
#include "reslab/resonator.hpp"
#include "reslab/rng.hpp"

#include <complex>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

using namespace reslab;

// Bitwise reproducibility across worker counts: every parallel reduction in
// the library merges per-block partial results in block order, so the worker
// count must never show up in the last ulp.

TEST_SUITE("determinism") {

TEST_CASE("scan_max_abs2 across workers") {
    std::mt19937_64 gen(5);
    kernels::PhaseSeries s;
    for (int k = 0; k < 33; ++k)
        s.add(std::polar(0.2 + uniform01(gen), uniform_real(gen, -3.0, 3.0)),
              uniform_real(gen, -9.0, 9.0));
    s.finalize();
    const std::size_t count = 5 * kernels::kBlockLen + 991;
    const auto base = kernels::scan_max_abs2(s, -1.0, 1.0 / 8192, count, 1);
    for (unsigned w : {2u, 3u, 4u, 7u}) {
        const auto got = kernels::scan_max_abs2(s, -1.0, 1.0 / 8192, count, w);
        CHECK(got.abs2 == base.abs2);
        CHECK(got.index == base.index);
    }
}

TEST_CASE("map_blocks merges in block order") {
    auto run = [](unsigned workers) {
        return map_blocks<std::vector<int>>(
            23, workers,
            [](std::size_t b) {
                return std::vector<int>{static_cast<int>(b), static_cast<int>(b * b)};
            });
    };
    const auto base = run(1);
    for (unsigned w : {2u, 5u}) {
        const auto got = run(w);
        REQUIRE(got.size() == base.size());
        for (std::size_t i = 0; i < base.size(); ++i) CHECK(got[i] == base[i]);
    }
}

TEST_CASE("gcd sum across workers") {
    std::vector<std::uint64_t> v;
    for (std::uint64_t n = 5000; n <= 5220; ++n) v.push_back(n);
    const resonator::IntegerSet M(std::move(v));
    const double base = gcdsum::gcd_sum(M, 1);
    for (unsigned w : {2u, 4u}) CHECK(gcdsum::gcd_sum(M, w) == base);
    const auto baseRep = gcdsum::gcd_sum_truncated(M, 64.0, 1);
    for (unsigned w : {3u, 4u}) {
        const auto rep = gcdsum::gcd_sum_truncated(M, 64.0, w);
        CHECK(rep.full == baseRep.full);
        CHECK(rep.truncated == baseRep.truncated);
        CHECK(rep.tail_exact == baseRep.tail_exact);
    }
}

TEST_CASE("quadrature across workers") {
    auto tbl = std::make_shared<arith::PrimeTable>(64);
    const auto f = multfn::sample_random_unimodular(tbl, 17);
    const auto A = moments::poly_series(f, 30);
    const auto B = moments::poly_series(f.conjugated(), 20);
    const double a = std::log(500.0) / 500.0;
    const auto base = quad::integrate_segment(A, &B, quad::Form::first_abs2, a, 1.0,
                                              500.0, 1e-9, 1);
    for (unsigned w : {2u, 4u}) {
        const auto got = quad::integrate_segment(A, &B, quad::Form::first_abs2, a, 1.0,
                                                 500.0, 1e-9, w);
        CHECK(got.value.real() == base.value.real());
        CHECK(got.value.imag() == base.value.imag());
        CHECK(got.points == base.points);
    }
    const auto lineBase = quad::integrate_line(A, nullptr, quad::Form::abs2, a, 1e-9, 1);
    for (unsigned w : {3u}) {
        const auto got = quad::integrate_line(A, nullptr, quad::Form::abs2, a, 1e-9, w);
        CHECK(got.value.real() == lineBase.value.real());
    }
}

TEST_CASE("moment reports across workers") {
    arith::PrimeTable sieve(64);
    auto tbl = std::make_shared<arith::PrimeTable>(64);
    const double T = 2000.0, N = 20.0;
    const auto R = resonator::build_hough(T, N, sieve, std::pair{3.0, 13.0});
    const auto f = multfn::sample_random_unimodular(tbl, 23);
    const auto base = moments::report_thm11(R, f, T, N, 1e-9, 1e9, 1);
    for (unsigned w : {2u, 4u}) {
        const auto rep = moments::report_thm11(R, f, T, N, 1e-9, 1e9, w);
        CHECK(rep.i1 == base.i1);
        CHECK(rep.m1 == base.m1);
        CHECK(rep.i2.real() == base.i2.real());
        CHECK(rep.m2.real() == base.m2.real());
        CHECK(rep.m2.imag() == base.m2.imag());
        CHECK(rep.err_m1 == base.err_m1);
        CHECK(rep.err_m2 == base.err_m2);
        CHECK(rep.lower_bound == base.lower_bound);
        CHECK(rep.lower_bound_low == base.lower_bound_low);
    }

    std::vector<std::uint64_t> v;
    for (std::uint64_t n = 60; n <= 90; ++n) v.push_back(n);
    const auto B = resonator::build_binned(resonator::IntegerSet(std::move(v)), 800.0);
    const auto base12 = moments::report_thm12(B, f, 800.0, N, 1e-8, 1e9, 1);
    for (unsigned w : {4u}) {
        const auto rep = moments::report_thm12(B, f, 800.0, N, 1e-8, 1e9, w);
        CHECK(rep.m1 == base12.m1);
        CHECK(rep.m2.real() == base12.m2.real());
        CHECK(rep.lower_bound == base12.lower_bound);
    }
}

TEST_CASE("find_max across workers") {
    auto tbl = std::make_shared<arith::PrimeTable>(64);
    const auto f = multfn::sample_random_unimodular(tbl, 29);
    const auto grid = extremes::TGrid::certified(1.0, 400.0, 30, 1e-2);
    const auto base = extremes::find_max(f, 30, grid, 1);
    for (unsigned w : {2u, 4u}) {
        const auto got = extremes::find_max(f, 30, grid, w);
        CHECK(got.t == base.t);
        CHECK(got.value == base.value);
        CHECK(got.grid_t == base.grid_t);
        CHECK(got.grid_value == base.grid_value);
        CHECK(got.certified_gap == base.certified_gap);
    }
}

TEST_CASE("worker resolution env override") {
    // resolve_workers(n > 0) passes through; 0 defers to the environment
    CHECK(resolve_workers(3) == 3);
    CHECK(resolve_workers(1) == 1);
    CHECK(resolve_workers(0) >= 1);
}

} // TEST_SUITE
