#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace reslab::kernels {

/// Coefficients of S(t) = sum_k w_k * exp(i * t * freq_k) in
/// structure-of-arrays form, zero-padded to the SIMD lane width.
struct PhaseSeries {
    std::vector<double> wre, wim, freq;
    std::size_t count = 0; // logical number of terms (<= wre.size())

    void add(std::complex<double> w, double f) {
        wre.push_back(w.real());
        wim.push_back(w.imag());
        freq.push_back(f);
        ++count;
    }

    /// Pads the arrays to a multiple of 4 with zero weights; call once after
    /// the last add().  Safe to call repeatedly.
    void finalize() {
        while (wre.size() % 4 != 0) {
            wre.push_back(0.0);
            wim.push_back(0.0);
            freq.push_back(0.0);
        }
    }

    double weight_abs_sum() const;
    double weight_sq_sum() const;
    double freq_min() const;
    double freq_max() const;
    /// sum_k |w_k * freq_k|, a bound on |dS/dt|; used for certified grids.
    double derivative_bound() const;
};

/// Evaluates S on the uniform grid t_j = t0 + j*dt for j in [0, count),
/// writing real/imaginary parts into out_re/out_im.
///
/// Implementations seed z_k = w_k * exp(i*t0*freq_k) exactly and advance by
/// one complex rotation per grid step.  Rounding drift grows like
/// sqrt(count)*eps, so drivers slice long grids into blocks of kBlockLen
/// points and re-seed at every block start; that caps the drift per stream
/// below 1e-9 and makes block results independent of which worker computes
/// them.
using EvalFn = void (*)(const PhaseSeries&, double t0, double dt,
                        std::size_t count, double* out_re, double* out_im);

inline constexpr std::size_t kBlockLen = std::size_t{1} << 16;

enum class Impl { Auto, Scalar, Avx2 };

/// Kernel lookup.  Impl::Auto resolves to the best implementation the CPU
/// supports (checked once at first use).
EvalFn get(Impl impl = Impl::Auto);

/// The implementation Impl::Auto currently resolves to.
Impl active();
const char* name(Impl impl);

/// Pins Impl::Auto to a specific implementation (Impl::Auto to re-detect).
/// Used by tests and the CLI's --kernel flag.
void force(Impl impl);

/// True when the AVX2 variant is compiled in and the CPU supports it.
bool avx2_available();

struct ScanMax {
    double abs2 = -1.0;    // max |S|^2 over the grid
    std::size_t index = 0; // smallest grid index attaining it
};

/// Deterministic max scan of |S|^2 over a uniform grid (blocked, parallel;
/// ties resolve to the smallest index regardless of worker count).
ScanMax scan_max_abs2(const PhaseSeries& s, double t0, double dt,
                      std::size_t count, unsigned workers);

} // namespace reslab::kernels
