#include "reslab/kernels.hpp"

#include "reslab/parallel.hpp"
#include "reslab/summation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace reslab::kernels {

void eval_grid_scalar(const PhaseSeries&, double, double, std::size_t, double*, double*);
#if defined(RESLAB_HAVE_AVX2_KERNEL)
void eval_grid_avx2(const PhaseSeries&, double, double, std::size_t, double*, double*);
#endif

double PhaseSeries::weight_abs_sum() const {
    Accumulator acc;
    for (std::size_t k = 0; k < count; ++k) acc.add(std::hypot(wre[k], wim[k]));
    return acc.value();
}

double PhaseSeries::weight_sq_sum() const {
    Accumulator acc;
    for (std::size_t k = 0; k < count; ++k) acc.add(wre[k] * wre[k] + wim[k] * wim[k]);
    return acc.value();
}

double PhaseSeries::freq_min() const {
    double m = 0.0;
    for (std::size_t k = 0; k < count; ++k) m = (k == 0) ? freq[k] : std::min(m, freq[k]);
    return m;
}

double PhaseSeries::freq_max() const {
    double m = 0.0;
    for (std::size_t k = 0; k < count; ++k) m = (k == 0) ? freq[k] : std::max(m, freq[k]);
    return m;
}

double PhaseSeries::derivative_bound() const {
    Accumulator acc;
    for (std::size_t k = 0; k < count; ++k)
        acc.add(std::hypot(wre[k], wim[k]) * std::fabs(freq[k]));
    return acc.value();
}

bool avx2_available() {
#if defined(RESLAB_HAVE_AVX2_KERNEL)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {
Impl g_forced = Impl::Auto;

Impl detect() {
    return avx2_available() ? Impl::Avx2 : Impl::Scalar;
}
} // namespace

void force(Impl impl) {
    if (impl == Impl::Avx2 && !avx2_available())
        throw std::invalid_argument("kernels::force: AVX2 kernel not available on this host");
    g_forced = impl;
}

Impl active() {
    return g_forced == Impl::Auto ? detect() : g_forced;
}

const char* name(Impl impl) {
    switch (impl) {
        case Impl::Auto: return "auto";
        case Impl::Scalar: return "scalar";
        case Impl::Avx2: return "avx2";
    }
    return "?";
}

EvalFn get(Impl impl) {
    if (impl == Impl::Auto) impl = active();
    switch (impl) {
        case Impl::Scalar: return &eval_grid_scalar;
        case Impl::Avx2:
#if defined(RESLAB_HAVE_AVX2_KERNEL)
            if (avx2_available()) return &eval_grid_avx2;
#endif
            throw std::invalid_argument("kernels::get: AVX2 kernel not available on this host");
        default: break;
    }
    return &eval_grid_scalar;
}

ScanMax scan_max_abs2(const PhaseSeries& s, double t0, double dt,
                      std::size_t count, unsigned workers) {
    if (count == 0) return {};
    EvalFn eval = get();
    std::size_t nblocks = (count + kBlockLen - 1) / kBlockLen;
    auto parts = map_blocks<ScanMax>(nblocks, workers, [&](std::size_t b) {
        std::size_t begin = b * kBlockLen;
        std::size_t len = std::min(kBlockLen, count - begin);
        thread_local std::vector<double> re, im;
        re.resize(kBlockLen);
        im.resize(kBlockLen);
        double tb = t0 + static_cast<double>(begin) * dt;
        eval(s, tb, dt, len, re.data(), im.data());
        ScanMax best;
        for (std::size_t j = 0; j < len; ++j) {
            double a2 = re[j] * re[j] + im[j] * im[j];
            if (a2 > best.abs2) {
                best.abs2 = a2;
                best.index = begin + j;
            }
        }
        return best;
    });
    ScanMax out;
    for (const ScanMax& p : parts)
        if (p.abs2 > out.abs2) out = p; // block order fixed; ties keep earlier index
    return out;
}

} // namespace reslab::kernels
