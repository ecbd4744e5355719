#include "doctest.h"

#include "reslab/kernels.hpp"
#include "reslab/rng.hpp"
#include "reslab/summation.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <vector>

using namespace reslab;

namespace {

kernels::PhaseSeries random_series(std::uint64_t seed, int terms) {
    std::mt19937_64 gen(seed);
    kernels::PhaseSeries s;
    for (int k = 0; k < terms; ++k) {
        const double mag = 0.1 + uniform01(gen);
        const double phase = uniform_real(gen, -3.14, 3.14);
        const double freq = uniform_real(gen, -8.0, 8.0);
        s.add(std::polar(mag, phase), freq);
    }
    s.finalize();
    return s;
}

// One sin/cos per term per point: the reference the incremental-rotation
// kernels must reproduce.
void direct_eval(const kernels::PhaseSeries& s, double t0, double dt,
                 std::size_t count, std::vector<double>& re,
                 std::vector<double>& im) {
    re.assign(count, 0.0);
    im.assign(count, 0.0);
    for (std::size_t j = 0; j < count; ++j) {
        const double t = t0 + static_cast<double>(j) * dt;
        Accumulator ar, ai;
        for (std::size_t k = 0; k < s.count; ++k) {
            const double c = std::cos(t * s.freq[k]), sn = std::sin(t * s.freq[k]);
            ar.add(s.wre[k] * c - s.wim[k] * sn);
            ai.add(s.wre[k] * sn + s.wim[k] * c);
        }
        re[j] = ar.value();
        im[j] = ai.value();
    }
}

} // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar kernel matches direct evaluation") {
    const auto s = random_series(11, 23);
    const std::size_t count = 257;
    std::vector<double> re_ref, im_ref, re(count), im(count);
    direct_eval(s, -2.0, 1.0 / 512, count, re_ref, im_ref);
    kernels::get(kernels::Impl::Scalar)(s, -2.0, 1.0 / 512, count, re.data(), im.data());
    const double scale = s.weight_abs_sum();
    for (std::size_t j = 0; j < count; ++j) {
        CHECK(std::fabs(re[j] - re_ref[j]) < 1e-11 * scale);
        CHECK(std::fabs(im[j] - im_ref[j]) < 1e-11 * scale);
    }
}

TEST_CASE("avx2 kernel agrees with scalar") {
    if (!kernels::avx2_available()) return;
    const auto s = random_series(17, 41);
    const std::size_t count = kernels::kBlockLen + 129; // force an odd tail
    std::vector<double> re_s(count), im_s(count), re_v(count), im_v(count);
    kernels::get(kernels::Impl::Scalar)(s, 0.25, 1.0 / 1024, count, re_s.data(), im_s.data());
    kernels::get(kernels::Impl::Avx2)(s, 0.25, 1.0 / 1024, count, re_v.data(), im_v.data());
    const double scale = s.weight_abs_sum();
    for (std::size_t j = 0; j < count; ++j) {
        CHECK(std::fabs(re_v[j] - re_s[j]) < 1e-11 * scale);
        CHECK(std::fabs(im_v[j] - im_s[j]) < 1e-11 * scale);
    }
}

TEST_CASE("rounding drift stays bounded over long grids") {
    const auto s = random_series(23, 17);
    const std::size_t count = 3 * kernels::kBlockLen; // three reseeded blocks
    std::vector<double> re(count), im(count);
    kernels::get()(s, 1.0, 1.0 / 4096, count, re.data(), im.data());
    const double scale = s.weight_abs_sum();
    // spot-check the last point of each block against direct evaluation
    for (std::size_t j : {kernels::kBlockLen - 1, 2 * kernels::kBlockLen - 1, count - 1}) {
        const double t = 1.0 + static_cast<double>(j) / 4096;
        Accumulator ar, ai;
        for (std::size_t k = 0; k < s.count; ++k) {
            ar.add(s.wre[k] * std::cos(t * s.freq[k]) - s.wim[k] * std::sin(t * s.freq[k]));
            ai.add(s.wre[k] * std::sin(t * s.freq[k]) + s.wim[k] * std::cos(t * s.freq[k]));
        }
        CHECK(std::fabs(re[j] - ar.value()) < 1e-9 * scale);
        CHECK(std::fabs(im[j] - ai.value()) < 1e-9 * scale);
    }
}

TEST_CASE("series helpers") {
    kernels::PhaseSeries s;
    s.add({3.0, -4.0}, 2.0);
    s.add({0.0, 1.0}, -5.0);
    s.finalize();
    s.finalize(); // idempotent
    CHECK(s.count == 2);
    CHECK(s.wre.size() % 4 == 0);
    CHECK(s.weight_abs_sum() == doctest::Approx(6.0));
    CHECK(s.weight_sq_sum() == doctest::Approx(26.0));
    CHECK(s.freq_min() == -5.0);
    CHECK(s.freq_max() == 2.0);
    CHECK(s.derivative_bound() == doctest::Approx(10.0 + 5.0));
}

TEST_CASE("scan max finds the argmax") {
    const auto s = random_series(31, 29);
    const std::size_t count = 2 * kernels::kBlockLen + 7;
    const double t0 = -4.0, dt = 1.0 / 2048;
    const auto scan = kernels::scan_max_abs2(s, t0, dt, count, 2);

    std::vector<double> re(count), im(count);
    kernels::get()(s, t0, dt, count, re.data(), im.data());
    double best = -1.0;
    std::size_t best_j = 0;
    for (std::size_t j = 0; j < count; ++j) {
        const double v = re[j] * re[j] + im[j] * im[j];
        if (v > best) {
            best = v;
            best_j = j;
        }
    }
    CHECK(scan.abs2 == best);
    CHECK(scan.index == best_j);
}

TEST_CASE("scan ties resolve to the smallest index") {
    kernels::PhaseSeries s;
    s.add({1.0, 0.0}, 0.0); // constant: every grid point ties
    s.finalize();
    for (unsigned workers : {1u, 3u}) {
        const auto scan = kernels::scan_max_abs2(s, 0.0, 0.5, 4 * kernels::kBlockLen, workers);
        CHECK(scan.index == 0);
        CHECK(scan.abs2 == 1.0);
    }
}

TEST_CASE("kernel forcing") {
    kernels::force(kernels::Impl::Scalar);
    CHECK(kernels::active() == kernels::Impl::Scalar);
    kernels::force(kernels::Impl::Auto);
    CHECK(kernels::active() != kernels::Impl::Auto); // resolved to something concrete
}

} // TEST_SUITE
